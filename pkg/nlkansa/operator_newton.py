"""Operator-Newton module, i.e. iterated linear collocation of the linearized boundary value problem."""

from multimethod import multimethod
import numpy as np
import scipy.linalg
import time
import typing

import nlkansa.config
import nlkansa.problems
import nlkansa.system
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)


def get_linearized_matrix(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray
) -> np.ndarray:
    """Obtain the linearized collocation matrix [L phi] at alpha.

    - PDE rows are sum_m c_m [D_m phi] with the coefficients c_m of the problem's linearized operator at the
      current iterate. Linear rows are the linear block itself, since linear conditions are their own linearization.
    """

    values = system.get_full_component_values(alpha)
    coefficients = system.problem.get_linearized_operator(system.pde_points, values)
    pde_rows = np.zeros((len(system.pde_points), system.column_count))
    for name, coefficient in coefficients.items():
        pde_rows += (
            np.asarray(coefficient, dtype=float)[:, np.newaxis]
            * system.component_matrices[system.problem.component_names.index(name)]
        )

    return np.concatenate([pde_rows, system.linear_matrix], axis=0)


def newton_iterate(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray
) -> np.ndarray:
    """Obtain the next operator-Newton iterate alpha + gamma with [L phi] gamma = -R_c(alpha).

    - The linearized matrix is factorized by LU with partial pivoting. Singular matrices raise `LinAlgError`.
    """

    collocation_residual = system.get_collocation_residual(alpha)
    matrix = get_linearized_matrix(system, alpha)
    lu_factors = scipy.linalg.lu_factor(matrix, check_finite=False)
    if np.any(np.diag(lu_factors[0]) == 0.0):
        logger.debug("Linearized collocation matrix is singular.")
        raise np.linalg.LinAlgError("Linearized collocation matrix is singular.")
    step = scipy.linalg.lu_solve(lu_factors, -collocation_residual)

    return alpha + step


class OperatorNewtonSolution(nlkansa.utils.ObjectBase):
    """Operator-Newton solution object.

    - Iterates `newton_iterate` until RMS(R_c) falls below `tolerance`, stagnates over `stagnation_window`
      iterations, or until the iteration limit.
    - Divergence is flagged once RMS(R_c) exceeds `divergence_factor` times its initial value, becomes non-finite,
      or the linearized matrix is singular.
    - The residual history holds RMS(R_c) for the initial and every subsequent iterate, the coefficient history
      holds the matching iterates.
    """

    alpha: np.ndarray
    alpha_history: typing.List[np.ndarray]
    residual_history: typing.List[float]
    iterations: int
    converged: bool
    diverged: bool
    reason: str
    solve_time: float

    @multimethod
    def __init__(
            self,
            system: nlkansa.system.CollocationSystem,
            guess_strategy: str,
            seed: int = 0,
            perturbation: float = None,
            **kwargs
    ):

        # Obtain initial coefficients from the guess strategy.
        alpha_initial = system.get_coefficients(
            nlkansa.problems.initial_guess(guess_strategy, system, seed=seed)
        )
        if perturbation is not None:
            alpha_initial = perturb_coefficients(alpha_initial, perturbation, seed)

        self.__init__(
            system,
            alpha_initial,
            **kwargs
        )

    @multimethod
    def __init__(
            self,
            system: nlkansa.system.CollocationSystem,
            alpha_initial: np.ndarray,
            max_iter: int = None,
            tolerance: float = None,
            divergence_factor: float = None,
            stagnation_window: int = None
    ):

        defaults = nlkansa.config.config['operator_newton']
        max_iter = defaults['max_iter'] if max_iter is None else max_iter
        tolerance = defaults['tolerance'] if tolerance is None else tolerance
        divergence_factor = defaults['divergence_factor'] if divergence_factor is None else divergence_factor
        stagnation_window = defaults['stagnation_window'] if stagnation_window is None else stagnation_window

        time_start = time.time()
        logger.debug(f"Starting operator-Newton iteration for {system.problem}.")

        alpha = np.array(alpha_initial, dtype=float)
        residual_initial = nlkansa.utils.get_rms(system.get_collocation_residual(alpha))
        self.residual_history = [residual_initial]
        self.alpha_history = [alpha]
        self.converged = residual_initial <= tolerance
        self.diverged = not np.isfinite(residual_initial)
        self.reason = 'Converged' if self.converged else 'Diverged' if self.diverged else 'MaxIter'

        # Operator-Newton iteration.
        iteration = 0
        while (
                (iteration < max_iter)
                and not (self.converged or self.diverged)
        ):

            # Obtain next iterate.
            try:
                alpha_next = newton_iterate(system, alpha)
                residual = nlkansa.utils.get_rms(system.get_collocation_residual(alpha_next))
            except (np.linalg.LinAlgError, ValueError, nlkansa.utils.EvaluationError) as exception:
                logger.debug(f"Operator-Newton iteration {iteration} failed: {exception}")
                residual = np.inf
                alpha_next = alpha
            iteration += 1
            self.residual_history.append(residual)
            self.alpha_history.append(alpha_next)
            logger.debug(f"Operator-Newton iteration {iteration}: RMS(R_c) = {residual:.6e}")

            # Check stopping conditions.
            if (not np.isfinite(residual)) or (residual > divergence_factor * residual_initial):
                self.diverged = True
                self.reason = 'Diverged'
                alpha = alpha_next
                break
            alpha = alpha_next
            if residual <= tolerance:
                self.converged = True
                self.reason = 'Converged'
            elif (
                (len(self.residual_history) > stagnation_window)
                and (residual >= min(self.residual_history[-stagnation_window - 1:-1]))
            ):
                self.reason = 'Stagnated'
                break

        # Reaching the iteration limit is considered undesired and triggers a warning.
        if (iteration >= max_iter) and not (self.converged or self.diverged):
            logger.warning(f"Operator-Newton iteration reached maximum limit of {max_iter} iterations.")

        self.alpha = alpha
        self.iterations = iteration
        self.solve_time = time.time() - time_start
        logger.debug(
            f"Completed operator-Newton iteration in {iteration} iterations: "
            f"RMS(R_c) = {self.residual_history[-1]:.6e}, reason = {self.reason}."
        )


def perturb_coefficients(
        alpha: np.ndarray,
        scale: float,
        seed: int = 0
) -> np.ndarray:
    """Perturb coefficients by delta / scale, where delta is a seeded standard normal vector."""

    if not (scale > 0.0):
        logger.error(f"Perturbation scale must be positive, but is: {scale}")
        raise nlkansa.utils.ConfigurationError("Perturbation scale must be positive.")

    return alpha + np.random.default_rng(seed).standard_normal(len(alpha)) / scale


def check_newton_equivalence(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray
) -> float:
    """Obtain the relative discrepancy max|[L phi] - J| / max|J| over the PDE rows in the full coefficient space."""

    linearized_matrix = get_linearized_matrix(system, alpha)[:len(system.pde_points)]
    jacobian = system.get_full_jacobian(alpha)

    return nlkansa.system.get_relative_discrepancy(linearized_matrix, jacobian)


class LinearizationReport(nlkansa.utils.ObjectBase):
    """Linearization validity report with the interior nodes which violate either condition."""

    gradient_norm: np.ndarray
    linearization_violations: np.ndarray
    ellipticity_violations: np.ndarray

    def __init__(
            self,
            gradient_norm: np.ndarray,
            is_linearizable: np.ndarray,
            is_elliptic: np.ndarray,
            node_indexes: np.ndarray
    ):

        self.gradient_norm = gradient_norm
        self.linearization_violations = node_indexes[~is_linearizable]
        self.ellipticity_violations = node_indexes[~is_elliptic]

    @property
    def is_valid(self) -> bool:
        return (len(self.linearization_violations) == 0) and (len(self.ellipticity_violations) == 0)


def check_linearization_validity(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray
) -> LinearizationReport:
    """Evaluate |G'(t)| t^2 <= 1 and G'(t) t > -G(t) with t = |∇u| at every interior node of the current iterate."""

    problem = system.problem
    if not isinstance(problem, nlkansa.problems.QuasilinearProblem):
        logger.error(f"Linearization validity check requires a quasilinear problem, but got {problem}.")
        raise nlkansa.utils.ConfigurationError("Linearization validity check requires a quasilinear problem.")

    node_indexes = np.arange(system.pointset.interior_count)
    points = system.pointset.nodes[node_indexes]
    gradient_norm = np.sqrt(
        system.evaluate(alpha, 'u_x', points) ** 2
        + system.evaluate(alpha, 'u_y', points) ** 2
    )
    is_linearizable, is_elliptic = problem.get_linearization_conditions(gradient_norm)
    report = LinearizationReport(gradient_norm, is_linearizable, is_elliptic, node_indexes)
    if not report.is_valid:
        logger.debug(
            f"Linearization conditions violated at {len(report.linearization_violations)} nodes, "
            f"ellipticity at {len(report.ellipticity_violations)} nodes."
        )

    return report
