"""Test problems."""

import numpy as np
from parameterized import parameterized
import time
import unittest

import nlkansa.config
import nlkansa.geometry
import nlkansa.problems
import nlkansa.rbf_kernels
import nlkansa.system
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)


def get_exact_values(
        problem: nlkansa.system.ProblemDefinition,
        points: np.ndarray
) -> dict:
    """Component values of the known exact solutions."""

    x = points[:, 0]
    y = points[:, 1]
    if isinstance(problem, nlkansa.problems.CubicSemilinearProblem):
        u = np.sin(np.pi * x) * np.sin(np.pi * y)
        return dict(u=u, laplacian_u=-2.0 * np.pi ** 2 * u)
    elif isinstance(problem, nlkansa.problems.PlateauProblem):
        return dict(
            u=np.log(np.cos(x) / np.cos(y)),
            u_x=-np.tan(x),
            u_y=np.tan(y),
            u_xx=-1.0 / np.cos(x) ** 2,
            u_xy=np.zeros(len(points)),
            u_yy=1.0 / np.cos(y) ** 2
        )
    elif isinstance(problem, nlkansa.problems.HeleShawProblem):
        # Linear pressure profile of the straight front.
        zeros = np.zeros(len(points))
        return dict(u=1.0 - 0.5 * x, u_x=zeros - 0.5, u_y=zeros, u_xx=zeros, u_xy=zeros, u_yy=zeros)
    elif isinstance(problem, nlkansa.problems.MongeAmpereProblem):
        u = np.exp(0.5 * np.sum(points ** 2, axis=1))
        labels = nlkansa.rbf_kernels.axis_labels
        return {
            f'u_{labels[index_1]}{labels[index_2]}':
                ((1.0 if index_1 == index_2 else 0.0) + points[:, index_1] * points[:, index_2]) * u
            for index_1, index_2 in problem.index_pairs
        }
    else:
        return dict(laplacian_u=np.full(len(points), 2.0 * problem.dim))


class TestProblems(unittest.TestCase):

    @parameterized.expand([
        ('cubic_semilinear', nlkansa.problems.cubic_semilinear(), 2),
        ('plateau', nlkansa.problems.plateau(0.1), 2),
        ('hele_shaw', nlkansa.problems.hele_shaw(0.6), 2),
        ('monge_ampere_2d', nlkansa.problems.monge_ampere(2), 2),
        ('monge_ampere_3d', nlkansa.problems.monge_ampere(3), 3),
        ('poisson', nlkansa.problems.poisson(2), 2)
    ])
    def test_exact_solution_residual(self, label, problem, dim):
        points = np.random.default_rng(0).uniform(0.1, 0.9, (25, dim))

        # Define expected result.
        expected = np.zeros(len(points))

        # Get actual result.
        time_start = time.time()
        actual = problem.get_residual(points, get_exact_values(problem, points))
        time_duration = time.time() - time_start
        logger.info(f"Test exact solution residual ({label}): Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        np.testing.assert_allclose(actual, expected, atol=1e-10)

    @parameterized.expand([
        ('plateau', nlkansa.problems.plateau(0.1)),
        ('hele_shaw', nlkansa.problems.hele_shaw(0.6)),
        ('monge_ampere_2d', nlkansa.problems.monge_ampere(2)),
        ('monge_ampere_3d', nlkansa.problems.monge_ampere(3)),
        ('cubic_semilinear', nlkansa.problems.cubic_semilinear())
    ])
    def test_linearized_operator(self, label, problem):
        random_generator = np.random.default_rng(1)
        points = random_generator.uniform(0.1, 0.9, (25, problem.dim))
        values = {name: random_generator.standard_normal(len(points)) for name in problem.component_names}
        if 'u_x' in values:
            values['u_x'] = random_generator.uniform(0.5, 1.5, len(points))

        # Define expected result.
        expected = np.reshape(problem.get_residual_d1(points, values), (len(problem.component_names), -1))

        # Get actual result.
        time_start = time.time()
        coefficients = problem.get_linearized_operator(points, values)
        actual = np.stack([
            coefficients.get(name, np.zeros(len(points))) * np.ones(len(points))
            for name in problem.component_names
        ])
        time_duration = time.time() - time_start
        logger.info(f"Test linearized operator ({label}): Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        np.testing.assert_allclose(actual, expected, rtol=1e-10, atol=1e-10 * np.max(np.abs(expected)))

    def test_linearization_conditions(self):
        # Define expected result.
        expected_linearizable = np.array([True, True, False])
        expected_elliptic = np.array([True, True, True])

        # Get actual result.
        time_start = time.time()
        actual_linearizable, actual_elliptic = (
            nlkansa.problems.hele_shaw(0.6).get_linearization_conditions(np.array([0.1, 0.5, 2.0]))
        )
        time_duration = time.time() - time_start
        logger.info(f"Test linearization conditions: Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        np.testing.assert_array_equal(actual_linearizable, expected_linearizable)
        np.testing.assert_array_equal(actual_elliptic, expected_elliptic)

    @parameterized.expand([
        ('unknown_type', 'biharmonic', dict(), nlkansa.utils.ConfigurationError),
        ('unknown_parameter', 'plateau', dict(radius=1.0), nlkansa.utils.ConfigurationError),
        ('plateau_margin', 'plateau', dict(margin=2.0), nlkansa.utils.DomainError),
        ('hele_shaw_gamma', 'hele_shaw', dict(gamma=-1.5), nlkansa.utils.DomainError),
        ('monge_ampere_dim', 'monge_ampere', dict(dim=1), nlkansa.utils.ConfigurationError)
    ])
    def test_make_problem_invalid(self, label, problem_type, parameters, exception_type):
        time_start = time.time()
        with self.assertRaises(exception_type):
            nlkansa.problems.make_problem(problem_type, **parameters)
        time_duration = time.time() - time_start
        logger.info(f"Test make_problem invalid ({label}): Completed in {time_duration:.6f} seconds.")

    def test_make_problem(self):
        time_start = time.time()
        problem = nlkansa.problems.make_problem('hele_shaw', gamma=0.3, motz_functions=3)
        time_duration = time.time() - time_start
        logger.info(f"Test make_problem: Completed in {time_duration:.6f} seconds.")

        self.assertIsInstance(problem, nlkansa.problems.HeleShawProblem)
        self.assertEqual(len(problem.get_enrichment()), 6)
        self.assertEqual(problem.component_names, nlkansa.problems.quasilinear_components)

    def test_catalog(self):
        time_start = time.time()
        catalog = nlkansa.problems.get_catalog()
        time_duration = time.time() - time_start
        logger.info(f"Test catalog: Completed in {time_duration:.6f} seconds.")

        self.assertEqual(
            sorted(catalog),
            ['cubic_semilinear', 'hele_shaw', 'monge_ampere_2d', 'monge_ampere_3d', 'plateau', 'poisson']
        )
        for problem_id, entry in catalog.items():
            self.assertEqual(entry.problem_id, problem_id)
            self.assertEqual(
                entry.definition.problem_type,
                entry.default_config['problem']['type']
            )

    def test_initial_guess_poisson(self):
        pointset = nlkansa.geometry.generate_grid('UnitSquare', nlkansa.config.config['tests']['grid_points_per_side'])
        system = nlkansa.system.build_system(
            nlkansa.rbf_kernels.KernelSpec('MQ', 0.3), pointset, nlkansa.problems.poisson(2)
        )

        # Get actual result.
        time_start = time.time()
        beta = nlkansa.problems.initial_guess('poisson', system, poisson_source=4.0)
        time_duration = time.time() - time_start
        logger.info(f"Test initial guess (poisson): Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        # The guess solves the linear problem itself, which has source 2 d = 4.
        self.assertLessEqual(np.max(np.abs(system.residual(beta))), 1e-6)
        convex, minimum_eigenvalue = nlkansa.problems.check_convexity(
            system, system.get_coefficients(beta), pointset.nodes[:pointset.interior_count]
        )
        self.assertTrue(convex)
        self.assertAlmostEqual(minimum_eigenvalue, 2.0, delta=0.5)

    def test_initial_guess_random(self):
        pointset = nlkansa.geometry.generate_grid('UnitSquare', 5)
        system = nlkansa.system.build_system(
            nlkansa.rbf_kernels.KernelSpec('MQ', 0.3), pointset, nlkansa.problems.cubic_semilinear()
        )

        time_start = time.time()
        beta_zero = nlkansa.problems.initial_guess('zero', system)
        beta_1 = nlkansa.problems.initial_guess('gaussian', system, seed=3)
        beta_2 = nlkansa.problems.initial_guess('gaussian', system, seed=3)
        beta_perturbed = nlkansa.problems.initial_guess('zero', system, seed=3, perturbation=100.0)
        time_duration = time.time() - time_start
        logger.info(f"Test initial guess (random): Completed in {time_duration:.6f} seconds.")

        np.testing.assert_array_equal(beta_zero, np.zeros(system.dimension))
        np.testing.assert_array_equal(beta_1, beta_2)
        self.assertLess(np.max(np.abs(beta_perturbed)), 0.1)
        self.assertGreater(np.max(np.abs(beta_perturbed)), 0.0)
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            nlkansa.problems.initial_guess('newton', system)
        # Cubic semilinear problem has a sign-changing source.
        with self.assertRaises(nlkansa.utils.GuessError):
            nlkansa.problems.initial_guess('poisson', system)


if __name__ == '__main__':
    unittest.main()
