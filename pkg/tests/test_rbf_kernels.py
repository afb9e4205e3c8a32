"""Test RBF kernels."""

import numpy as np
from parameterized import parameterized
import scipy.special
import time
import unittest

import nlkansa.config
import nlkansa.rbf_kernels
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

kernels = [
    ('mq', dict(family='MQ', shape=0.3)),
    ('imq', dict(family='IMQ', shape=0.75)),
    ('matern', dict(family='MATERN', shape=0.5, alpha=11)),
    ('wc4', dict(family='WC4', shape=1.5))
]


def get_finite_difference_matrix(
        kernel: nlkansa.rbf_kernels.KernelSpec,
        component_name: str,
        points_row: np.ndarray,
        points_centre: np.ndarray,
        step: float = 1e-4
) -> np.ndarray:
    """Central difference approximation of [D_m phi] from the identity component."""

    def get_values(points: np.ndarray) -> np.ndarray:
        return nlkansa.rbf_kernels.assemble_matrix(
            kernel, nlkansa.rbf_kernels.get_component('u'), points, points_centre
        )

    def get_shifted(axis: int, sign: float) -> np.ndarray:
        points = points_row.copy()
        points[:, axis] += sign * step
        return points

    component = nlkansa.rbf_kernels.get_component(component_name)
    if component.kind == 'first':
        axis = component.axes[0]
        return (get_values(get_shifted(axis, 1.0)) - get_values(get_shifted(axis, -1.0))) / (2.0 * step)
    elif component.kind == 'second' and (component.axes[0] == component.axes[1]):
        axis = component.axes[0]
        return (
            get_values(get_shifted(axis, 1.0)) - 2.0 * get_values(points_row) + get_values(get_shifted(axis, -1.0))
        ) / step ** 2
    elif component.kind == 'second':
        axis_1, axis_2 = component.axes
        points = dict()
        for sign_1 in [1.0, -1.0]:
            for sign_2 in [1.0, -1.0]:
                shifted = points_row.copy()
                shifted[:, axis_1] += sign_1 * step
                shifted[:, axis_2] += sign_2 * step
                points[(sign_1, sign_2)] = get_values(shifted)
        return (
            points[(1.0, 1.0)] - points[(1.0, -1.0)] - points[(-1.0, 1.0)] + points[(-1.0, -1.0)]
        ) / (4.0 * step ** 2)
    else:
        return sum(
            get_finite_difference_matrix(kernel, f'u_{label}{label}', points_row, points_centre, step)
            for label in nlkansa.rbf_kernels.axis_labels[:kernel.dim]
        )


class TestRBFKernels(unittest.TestCase):

    @parameterized.expand(kernels)
    def test_assemble_matrix(self, label, kernel_config):
        random_generator = np.random.default_rng(3)
        kernel = nlkansa.rbf_kernels.KernelSpec(**kernel_config)
        points_row = random_generator.uniform(0.0, 1.0, (6, 2))
        points_centre = random_generator.uniform(0.0, 1.0, (5, 2))

        for component_name, step in [('u_x', 1e-5), ('u_y', 1e-5), ('u_xx', 1e-3), ('u_xy', 1e-3),
                                     ('u_yy', 1e-3), ('laplacian_u', 1e-3)]:
            # Define expected result.
            expected = get_finite_difference_matrix(kernel, component_name, points_row, points_centre, step)

            # Get actual result.
            time_start = time.time()
            actual = nlkansa.rbf_kernels.assemble_matrix(
                kernel, nlkansa.rbf_kernels.get_component(component_name), points_row, points_centre
            )
            time_duration = time.time() - time_start
            logger.info(f"Test assemble_matrix ({label}, {component_name}): Completed in {time_duration:.6f} seconds.")

            # Compare expected and actual.
            np.testing.assert_allclose(actual, expected, rtol=0.0, atol=1e-4 * np.max(np.abs(expected)))

    @parameterized.expand(kernels)
    def test_component_parity(self, label, kernel_config):
        kernel = nlkansa.rbf_kernels.KernelSpec(**kernel_config)
        points = np.random.default_rng(5).uniform(0.0, 1.0, (8, 2))

        time_start = time.time()
        for component_name in ['u', 'u_x', 'u_y', 'u_xx', 'u_xy', 'laplacian_u']:
            component = nlkansa.rbf_kernels.get_component(component_name)
            matrix = nlkansa.rbf_kernels.assemble_matrix(kernel, component, points, points)
            np.testing.assert_allclose(matrix.T, component.parity * matrix, rtol=1e-12, atol=1e-12)
        time_duration = time.time() - time_start
        logger.info(f"Test component parity ({label}): Completed in {time_duration:.6f} seconds.")

    def test_matern_limit(self):
        # Define expected result.
        expected = 2.0 ** 3.5 * scipy.special.gamma(4.5)

        # Get actual result.
        time_start = time.time()
        kernel = nlkansa.rbf_kernels.KernelSpec('MATERN', 0.1, alpha=11, normalize=False)
        actual = nlkansa.rbf_kernels.eval_kernel(kernel, 0.0)
        actual_nearby = nlkansa.rbf_kernels.eval_kernel(kernel, 1e-9)
        time_duration = time.time() - time_start
        logger.info(f"Test Matérn limit: Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        self.assertAlmostEqual(actual, expected, places=8)
        self.assertAlmostEqual(actual_nearby / expected, 1.0, places=8)

    def test_matern_normalize(self):
        time_start = time.time()
        kernel = nlkansa.rbf_kernels.KernelSpec('MATERN', 0.1, alpha=11, normalize=True)
        actual = nlkansa.rbf_kernels.eval_kernel(kernel, 0.0)
        time_duration = time.time() - time_start
        logger.info(f"Test Matérn normalize: Completed in {time_duration:.6f} seconds.")

        self.assertAlmostEqual(actual, 1.0, places=12)

    def test_matern_missing_limit(self):
        # Bessel order 1/2 has no finite first derivative limit at r = 0.
        kernel = nlkansa.rbf_kernels.KernelSpec('MATERN', 0.5, alpha=3)
        points = np.array([[0.0, 0.0], [0.5, 0.5]])

        time_start = time.time()
        with self.assertRaises(nlkansa.utils.DomainError):
            component = nlkansa.rbf_kernels.get_component('laplacian_u')
            nlkansa.rbf_kernels.assemble_matrix(kernel, component, points, points)
        time_duration = time.time() - time_start
        logger.info(f"Test Matérn missing limit: Completed in {time_duration:.6f} seconds.")

    def test_wendland_support(self):
        # Define expected result.
        expected = np.array([3.0, 0.0, 0.0])

        # Get actual result.
        time_start = time.time()
        kernel = nlkansa.rbf_kernels.KernelSpec('WC4', 0.3)
        actual = nlkansa.rbf_kernels.eval_kernel(kernel, [0.0, 0.3, 0.45])
        time_duration = time.time() - time_start
        logger.info(f"Test Wendland support: Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        np.testing.assert_allclose(actual, expected)

    def test_kernel_repr(self):
        time_start = time.time()
        actual = [
            repr(nlkansa.rbf_kernels.KernelSpec('MATERN', 0.1, alpha=11)),
            repr(nlkansa.rbf_kernels.KernelSpec('wc4', 0.3)),
            repr(nlkansa.rbf_kernels.KernelSpec('MQ', 0.3))
        ]
        time_duration = time.time() - time_start
        logger.info(f"Test kernel repr: Completed in {time_duration:.6f} seconds.")

        self.assertEqual(actual, ["MATERN(alpha=11, c=0.1)", "WC4(L=0.3)", "MQ(c=0.3)"])

    @parameterized.expand([
        ('unknown_family', dict(family='GA', shape=0.3)),
        ('negative_shape', dict(family='MQ', shape=-0.3)),
        ('matern_without_alpha', dict(family='MATERN', shape=0.3)),
        ('matern_low_order', dict(family='MATERN', shape=0.3, alpha=2)),
        ('augmented_imq', dict(family='IMQ', shape=0.3, augment_constant=True))
    ])
    def test_kernel_invalid(self, label, kernel_config):
        time_start = time.time()
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            nlkansa.rbf_kernels.KernelSpec(**kernel_config)
        time_duration = time.time() - time_start
        logger.info(f"Test invalid kernel ({label}): Completed in {time_duration:.6f} seconds.")

    def test_get_component(self):
        time_start = time.time()
        components = [nlkansa.rbf_kernels.get_component(name) for name in ['u', 'u_z', 'u_yx', 'laplacian_u']]
        time_duration = time.time() - time_start
        logger.info(f"Test get_component: Completed in {time_duration:.6f} seconds.")

        self.assertEqual([component.name for component in components], ['u', 'u_z', 'u_xy', 'laplacian_u'])
        self.assertEqual([component.parity for component in components], [1, -1, 1, 1])
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            nlkansa.rbf_kernels.get_component('u_xyz')


if __name__ == '__main__':
    unittest.main()
