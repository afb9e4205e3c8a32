"""Test operator-Newton."""

import numpy as np
from parameterized import parameterized
import time
import unittest

import nlkansa.api
import nlkansa.config
import nlkansa.operator_newton
import nlkansa.problems
import nlkansa.system
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)


def get_full_system(problem_id: str) -> nlkansa.system.CollocationSystem:
    run_config = nlkansa.api.RunConfig(problem_id)
    return nlkansa.api.get_collocation_system(
        run_config.problem, run_config.kernel, run_config.pointset, eliminate=False, seed=run_config.seed
    )


class TestOperatorNewton(unittest.TestCase):

    def test_operator_newton_solution_poisson(self):
        system = get_full_system('poisson')

        time_start = time.time()
        solution = nlkansa.operator_newton.OperatorNewtonSolution(system, np.zeros(system.column_count))
        time_duration = time.time() - time_start
        logger.info(f"Test OperatorNewtonSolution (poisson): Completed in {time_duration:.6f} seconds.")

        # Linear problems are solved by a single iteration.
        self.assertGreater(solution.residual_history[0], 0.0)
        self.assertLess(solution.residual_history[1], 1e-6 * solution.residual_history[0])
        self.assertFalse(solution.diverged)
        self.assertIn(solution.reason, ['Converged', 'Stagnated'])
        self.assertEqual(len(solution.alpha_history), len(solution.residual_history))
        self.assertEqual(solution.iterations, len(solution.residual_history) - 1)

    def test_operator_newton_solution_guess_strategy(self):
        system = get_full_system('plateau')

        time_start = time.time()
        solution_1 = nlkansa.operator_newton.OperatorNewtonSolution(
            system, 'laplacian', seed=1, perturbation=10.0, max_iter=3
        )
        solution_2 = nlkansa.operator_newton.OperatorNewtonSolution(
            system, 'laplacian', seed=1, perturbation=10.0, max_iter=3
        )
        time_duration = time.time() - time_start
        logger.info(f"Test OperatorNewtonSolution (guess strategy): Completed in {time_duration:.6f} seconds.")

        self.assertLessEqual(solution_1.iterations, 3)
        np.testing.assert_array_equal(solution_1.alpha_history[0], solution_2.alpha_history[0])
        np.testing.assert_array_equal(solution_1.residual_history, solution_2.residual_history)

    def test_operator_newton_divergence(self):
        system = get_full_system('cubic_semilinear')
        alpha = np.random.default_rng(5).standard_normal(system.column_count)

        time_start = time.time()
        solution = nlkansa.operator_newton.OperatorNewtonSolution(system, alpha, divergence_factor=1e-9)
        time_duration = time.time() - time_start
        logger.info(f"Test OperatorNewtonSolution (divergence): Completed in {time_duration:.6f} seconds.")

        self.assertTrue(solution.diverged)
        self.assertFalse(solution.converged)
        self.assertEqual(solution.reason, 'Diverged')
        self.assertEqual(solution.iterations, 1)

    def test_perturb_coefficients(self):
        alpha = np.ones(10)

        time_start = time.time()
        alpha_1 = nlkansa.operator_newton.perturb_coefficients(alpha, 100.0, seed=2)
        alpha_2 = nlkansa.operator_newton.perturb_coefficients(alpha, 100.0, seed=2)
        time_duration = time.time() - time_start
        logger.info(f"Test perturb_coefficients: Completed in {time_duration:.6f} seconds.")

        np.testing.assert_array_equal(alpha_1, alpha_2)
        np.testing.assert_allclose(
            alpha_1 - alpha, np.random.default_rng(2).standard_normal(10) / 100.0
        )
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            nlkansa.operator_newton.perturb_coefficients(alpha, 0.0)

    @parameterized.expand([
        ('cubic_semilinear',),
        ('plateau',),
        ('monge_ampere_2d',)
    ])
    def test_check_newton_equivalence(self, problem_id):
        system = get_full_system(problem_id)
        alpha = nlkansa.operator_newton.perturb_coefficients(
            system.get_coefficients(nlkansa.problems.initial_guess('laplacian', system)), 10.0, seed=3
        ) if isinstance(system.problem, nlkansa.problems.QuasilinearProblem) else (
            np.random.default_rng(3).standard_normal(system.column_count)
        )

        time_start = time.time()
        discrepancy = nlkansa.operator_newton.check_newton_equivalence(system, alpha)
        time_duration = time.time() - time_start
        logger.info(f"Test check_newton_equivalence ({problem_id}): Completed in {time_duration:.6f} seconds.")

        self.assertLessEqual(discrepancy, 1e-10)

    def test_newton_iterate(self):
        system = get_full_system('cubic_semilinear')
        alpha = np.random.default_rng(4).standard_normal(system.column_count)

        # Define expected result.
        expected = np.zeros(system.column_count)

        # Get actual result.
        time_start = time.time()
        alpha_next = nlkansa.operator_newton.newton_iterate(system, alpha)
        actual = (
            nlkansa.operator_newton.get_linearized_matrix(system, alpha) @ (alpha_next - alpha)
            + system.get_collocation_residual(alpha)
        )
        time_duration = time.time() - time_start
        logger.info(f"Test newton_iterate: Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        np.testing.assert_allclose(
            actual, expected, atol=1e-8 * max(1.0, np.max(np.abs(system.get_collocation_residual(alpha))))
        )

    def test_check_linearization_validity(self):
        system = get_full_system('plateau')
        alpha = system.get_coefficients(nlkansa.problems.initial_guess('laplacian', system))

        time_start = time.time()
        report = nlkansa.operator_newton.check_linearization_validity(system, alpha)
        time_duration = time.time() - time_start
        logger.info(f"Test check_linearization_validity: Completed in {time_duration:.6f} seconds.")

        self.assertTrue(report.is_valid)
        self.assertEqual(len(report.gradient_norm), system.pointset.interior_count)
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            poisson_system = get_full_system('poisson')
            nlkansa.operator_newton.check_linearization_validity(
                poisson_system, np.zeros(poisson_system.column_count)
            )


if __name__ == '__main__':
    unittest.main()
