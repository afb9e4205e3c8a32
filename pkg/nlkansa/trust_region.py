"""Trust-region rootfinder module for the merit function 0.5 |W|^2.

The solver works with any merit provider, i.e. an object with the methods

- ``get_merit(beta)``, returning the merit at beta,
- ``get_merit_state(beta, with_hessian=False)``, returning a merit state with the attributes
  ``merit``, ``gradient``, ``jacobian`` and ``hessian``.

`nlkansa.system.CollocationSystem` is such a provider. `FiniteDifferenceProvider` wraps it to replace the analytic
Jacobian by finite differences.
"""

from math import copysign
import numpy as np
import scipy.linalg
import time
import typing

import nlkansa.config
import nlkansa.system
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

# Trust-region subproblem methods and their default scaling, by name.
trs_methods = {
    'dogleg': ('dogleg', False),
    'full': ('nearly_exact', False),
    'full-scaled': ('nearly_exact', True),
    '2dsub': ('twod_subspace', False),
    '2dsub-scaled': ('twod_subspace', True)
}


class TrustRegionConfig(nlkansa.utils.ObjectBase):
    """Trust-region configuration object.

    - `method` is one of 'dogleg', 'nearly_exact', 'twod_subspace'. See `trs_methods` for the run names.
    - Defaults are taken from the `trust_region` section of the configuration. The initial radius defaults to
      `delta_initial_scaled` for scaled runs and `delta_initial` otherwise, the maximum radius to
      `delta_max_factor` times the initial radius.
    """

    method: str
    scaling: bool
    delta_initial: float
    delta_max: float
    eta: float
    max_iter: int
    stagnation_window: int
    stagnation_tolerance: float
    merit_floor_factor: float
    eig_tol: float

    def __init__(
            self,
            method: str = 'dogleg',
            scaling: bool = False,
            delta_initial: float = None,
            delta_max: float = None,
            eta: float = None,
            max_iter: int = None,
            stagnation_window: int = None,
            stagnation_tolerance: float = None,
            merit_floor_factor: float = None,
            eig_tol: float = None
    ):

        defaults = nlkansa.config.config['trust_region']

        self.method = method
        self.scaling = bool(scaling)
        self.delta_initial = float(
            delta_initial if delta_initial is not None
            else defaults['delta_initial_scaled'] if self.scaling
            else defaults['delta_initial']
        )
        self.delta_max = float(
            delta_max if delta_max is not None
            else defaults['delta_max_factor'] * self.delta_initial
        )
        self.eta = float(defaults['eta'] if eta is None else eta)
        self.max_iter = int(defaults['max_iter'] if max_iter is None else max_iter)
        self.stagnation_window = int(defaults['stagnation_window'] if stagnation_window is None else stagnation_window)
        self.stagnation_tolerance = float(
            defaults['stagnation_tolerance'] if stagnation_tolerance is None else stagnation_tolerance
        )
        self.merit_floor_factor = float(
            defaults['merit_floor_factor'] if merit_floor_factor is None else merit_floor_factor
        )
        self.eig_tol = float(defaults['eig_tol'] if eig_tol is None else eig_tol)

        # Validate parameters.
        if self.method not in ['dogleg', 'nearly_exact', 'twod_subspace']:
            logger.error(f"Unknown trust-region subproblem method: {method}")
            raise nlkansa.utils.ConfigurationError(f"Unknown trust-region subproblem method: {method}")
        if not (0.0 < self.delta_initial <= self.delta_max):
            logger.error(f"Invalid trust-region radii: initial {self.delta_initial}, max {self.delta_max}")
            raise nlkansa.utils.ConfigurationError("Trust-region radii must satisfy 0 < initial <= max.")
        if not (0.0 <= self.eta < 0.25):
            logger.error(f"Acceptance threshold must lie in [0, 1/4), but is: {self.eta}")
            raise nlkansa.utils.ConfigurationError("Acceptance threshold must lie in [0, 1/4).")
        if (self.max_iter < 0) or (self.stagnation_window < 1):
            logger.error("Iteration limit must be nonnegative and stagnation window positive.")
            raise nlkansa.utils.ConfigurationError("Invalid iteration limit or stagnation window.")

    @classmethod
    def from_name(
            cls,
            name: str,
            **parameters
    ):
        """Obtain configuration for a run name, e.g. 'dogleg', 'full', 'full-scaled', '2dsub', '2dsub-scaled'."""

        if name not in trs_methods:
            logger.error(f"Unknown trust-region method name: {name}. Choices: {list(trs_methods)}")
            raise nlkansa.utils.ConfigurationError(f"Unknown trust-region method name: {name}")
        method, scaling = trs_methods[name]

        return cls(method=method, scaling=parameters.pop('scaling', scaling), **parameters)

    @property
    def requires_hessian(self) -> bool:
        return (self.method != 'dogleg') or self.scaling


class IterationRecord(nlkansa.utils.ObjectBase):
    """Iteration record of the trust-region solver. The step is accepted iff rho > eta."""

    iteration: int
    merit: float
    delta: float
    rho: float
    step_kind: str
    step_norm: float
    accepted: bool
    hessian_positive_definite: typing.Optional[bool]

    def __init__(
            self,
            iteration: int,
            merit: float,
            delta: float,
            rho: float,
            step_kind: str,
            step_norm: float,
            accepted: bool,
            hessian_positive_definite: bool = None
    ):

        self.iteration = iteration
        self.merit = merit
        self.delta = delta
        self.rho = rho
        self.step_kind = step_kind
        self.step_norm = step_norm
        self.accepted = accepted
        self.hessian_positive_definite = hessian_positive_definite

    def to_dict(self) -> dict:
        return dict(
            k=self.iteration,
            mu=self.merit,
            delta=self.delta,
            rho=(None if not np.isfinite(self.rho) else self.rho),
            step_kind=self.step_kind,
            step_norm=self.step_norm,
            accepted=self.accepted,
            hessian_pd=self.hessian_positive_definite
        )


class SolveReport(nlkansa.utils.ObjectBase):
    """Solve report object with the iteration trace and the final iterate.

    - `reason` is one of 'Stagnated', 'MaxIter', 'NonFinite'. Converged runs stop by stagnation of the merit
      below the merit floor, hence carry 'Stagnated' with `converged` set.
    """

    trace: typing.List[IterationRecord]
    beta: np.ndarray
    merit: float
    merit_initial: float
    converged: bool
    reason: str
    jacobian_condition: float
    hessian_condition: typing.Optional[float]
    iterations: int
    accepted_steps: int
    solve_time: float

    def __init__(
            self,
            trace: typing.List[IterationRecord],
            beta: np.ndarray,
            merit: float,
            merit_initial: float,
            converged: bool,
            reason: str,
            jacobian_condition: float = np.nan,
            hessian_condition: float = None,
            solve_time: float = np.nan
    ):

        self.trace = trace
        self.beta = beta
        self.merit = merit
        self.merit_initial = merit_initial
        self.converged = converged
        self.reason = reason
        self.jacobian_condition = jacobian_condition
        self.hessian_condition = hessian_condition
        self.iterations = len(trace)
        self.accepted_steps = sum(record.accepted for record in trace)
        self.solve_time = solve_time

    def get_trace_records(self) -> typing.List[dict]:
        return [record.to_dict() for record in self.trace]


class FiniteDifferenceProvider(object):
    """Merit provider with finite difference Jacobian, wrapping a collocation system.

    - The Hessian, where requested, is the Gauss-Newton approximation J^T J of the finite difference Jacobian.
    """

    def __init__(
            self,
            system: nlkansa.system.CollocationSystem,
            scheme: str = 'forward'
    ):
        self.system = system
        self.scheme = scheme

    def get_merit(self, beta: np.ndarray) -> float:
        return self.system.get_merit(beta)

    def get_merit_state(
            self,
            beta: np.ndarray,
            with_hessian: bool = False
    ) -> nlkansa.system.MeritState:

        jacobian = nlkansa.system.fd_jacobian(self.system, beta, scheme=self.scheme)

        return nlkansa.system.MeritState(
            beta,
            self.system.get_coefficients(beta),
            self.system.residual(beta),
            jacobian,
            (jacobian.T @ jacobian) if with_hessian else None
        )


def get_model_value(
        step: np.ndarray,
        gradient: np.ndarray,
        hessian: np.ndarray = None,
        jacobian: np.ndarray = None
) -> float:
    """Quadratic model theta(step) - theta(0) = g^T step + 0.5 step^T A step, with A = H or A = J^T J."""

    if jacobian is not None:
        curvature = float(np.sum((jacobian @ step) ** 2))
    else:
        curvature = float(step @ hessian @ step)

    return float(gradient @ step) + 0.5 * curvature


def cauchy_step(
        gradient: np.ndarray,
        hessian: np.ndarray,
        delta: float,
        jacobian: np.ndarray = None
) -> np.ndarray:
    """Cauchy step, i.e. the model minimizer along steepest descent within the trust region.

    - The model matrix is `hessian`, or J^T J if `jacobian` is given, which is then not formed explicitly.
    """

    gradient_norm = np.linalg.norm(gradient)
    if gradient_norm == 0.0:
        logger.error("Cauchy step is undefined for zero gradient.")
        raise nlkansa.utils.StepConstructionError("Cauchy step is undefined for zero gradient.")

    if jacobian is not None:
        curvature = float(np.sum((jacobian @ gradient) ** 2))
    else:
        curvature = float(gradient @ hessian @ gradient)
    if curvature <= 0.0:
        tau = 1.0
    else:
        tau = min(gradient_norm ** 3 / (delta * curvature), 1.0)

    return -tau * (delta / gradient_norm) * gradient


def get_intersection(
        start: np.ndarray,
        direction: np.ndarray,
        delta: float
) -> float:
    """Obtain the nonnegative t with |start + t direction| = delta, for `start` within the trust region."""

    a = float(direction @ direction)
    b = float(start @ direction)
    c = float(start @ start) - delta ** 2
    if c > 0.0:
        logger.error("Intersection start point is outside of the trust region.")
        raise ValueError("Intersection start point is outside of the trust region.")
    discriminant = np.sqrt(b * b - a * c)
    q = -(b + copysign(discriminant, b))
    if q == 0.0:
        return 0.0

    return max(q / a, c / q)


def dogleg_step(
        gradient: np.ndarray,
        jacobian: np.ndarray,
        delta: float
) -> typing.Tuple[np.ndarray, str]:
    """Dogleg step for the model with A = J^T J.

    - The full step solves J^T J step = -g via pivoted QR of J and two triangular solves, which avoids
      squaring the condition number.
    - Numerically singular J yields the Cauchy step.
    """

    # Obtain full step.
    q_factor, r_factor, permutation = scipy.linalg.qr(jacobian, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(r_factor))
    if (
        (r_factor.shape[0] < r_factor.shape[1])
        or (diagonal[0] == 0.0)
        or (diagonal[-1] <= max(jacobian.shape) * nlkansa.config.machine_epsilon * diagonal[0])
    ):
        logger.debug("Jacobian is numerically singular. Taking Cauchy step.")
        return cauchy_step(gradient, None, delta, jacobian=jacobian), 'Cauchy'
    intermediate = scipy.linalg.solve_triangular(r_factor, -gradient[permutation], trans='T')
    full_step = np.zeros(len(gradient))
    full_step[permutation] = scipy.linalg.solve_triangular(r_factor, intermediate)
    if np.linalg.norm(full_step) <= delta:
        return full_step, 'Full'

    # Obtain unconstrained steepest descent minimizer.
    gradient_squared = float(gradient @ gradient)
    curvature = float(np.sum((jacobian @ gradient) ** 2))
    if curvature == 0.0:
        return -(delta / np.sqrt(gradient_squared)) * gradient, 'Cauchy'
    steepest_descent_step = -(gradient_squared / curvature) * gradient
    if np.linalg.norm(steepest_descent_step) >= delta:
        return -(delta / np.sqrt(gradient_squared)) * gradient, 'Cauchy'

    # Obtain intersection of the second dogleg segment with the trust region boundary.
    t = get_intersection(steepest_descent_step, full_step - steepest_descent_step, delta)

    return steepest_descent_step + t * (full_step - steepest_descent_step), 'Dogleg'


def get_eigen_decomposition(
        hessian: np.ndarray
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in ascending order and eigenvectors of the symmetric matrix."""
    return scipy.linalg.eigh(hessian)


def nearly_exact_step(
        gradient: np.ndarray,
        hessian: np.ndarray,
        delta: float,
        eigen_decomposition: typing.Tuple[np.ndarray, np.ndarray] = None,
        tolerance: float = 1e-12,
        max_iter: int = 200
) -> typing.Tuple[np.ndarray, str]:
    """Nearly-exact trust-region step via eigendecomposition and the secular equation.

    - Solves (H + lambda I) step = -g with lambda >= 0, H + lambda I positive semidefinite and
      lambda (delta - |step|) = 0.
    - lambda is found by safeguarded Newton iterations on 1 / |step(lambda)| - 1 / delta within the bracket
      [max(0, -lambda_min), |g| / delta - lambda_min].
    - In the hard case, g is orthogonal to the eigenspace of lambda_min and the boundary is reached by adding a
      multiple of the smallest eigenvector.
    """

    if eigen_decomposition is None:
        eigen_decomposition = get_eigen_decomposition(hessian)
    eigenvalues, eigenvectors = eigen_decomposition
    gradient_projected = eigenvectors.T @ gradient
    gradient_norm = np.linalg.norm(gradient)
    eigenvalue_minimum = eigenvalues[0]

    def get_step(multiplier: float) -> np.ndarray:
        return -eigenvectors @ (gradient_projected / (eigenvalues + multiplier))

    # Interior solution.
    if eigenvalue_minimum > 0.0:
        step = get_step(0.0)
        if np.linalg.norm(step) <= delta:
            return step, 'Full'

    # Hard case.
    is_minimum = eigenvalues <= eigenvalue_minimum + 1e-10 * max(1.0, abs(eigenvalue_minimum))
    if (eigenvalue_minimum <= 0.0) and (
        np.linalg.norm(gradient_projected[is_minimum]) <= 1e-10 * max(gradient_norm, np.finfo(float).tiny)
    ):
        multiplier = -eigenvalue_minimum
        with np.errstate(divide='ignore', invalid='ignore'):
            step_projected = np.where(is_minimum, 0.0, -gradient_projected / (eigenvalues + multiplier))
        step_orthogonal = eigenvectors @ step_projected
        step_orthogonal_norm = np.linalg.norm(step_orthogonal)
        if step_orthogonal_norm <= delta:
            eigenvector = eigenvectors[:, 0]
            length = np.sqrt(max(delta ** 2 - step_orthogonal_norm ** 2, 0.0))
            if eigenvector @ gradient > 0.0:
                length = -length
            return step_orthogonal + length * eigenvector, 'NearlyExact'

    # Secular equation.
    lower_bound = max(0.0, -eigenvalue_minimum)
    upper_bound = gradient_norm / delta - eigenvalue_minimum
    multiplier = 0.5 * (lower_bound + upper_bound)
    for iteration in range(max_iter):
        shifted_eigenvalues = eigenvalues + multiplier
        if np.any(shifted_eigenvalues <= 0.0):
            lower_bound = multiplier
            multiplier = 0.5 * (lower_bound + upper_bound)
            continue
        step_projected = gradient_projected / shifted_eigenvalues
        step_norm = np.linalg.norm(step_projected)
        if abs(step_norm - delta) <= tolerance * delta:
            break
        if step_norm > delta:
            lower_bound = multiplier
        else:
            upper_bound = multiplier
        secular_value = 1.0 / step_norm - 1.0 / delta
        secular_derivative = np.sum(step_projected ** 2 / shifted_eigenvalues) / step_norm ** 3
        multiplier_next = multiplier - secular_value / secular_derivative
        if not (lower_bound < multiplier_next < upper_bound):
            multiplier_next = 0.5 * (lower_bound + upper_bound)
        if multiplier_next == multiplier:
            break
        multiplier = multiplier_next
    else:
        logger.debug(f"Secular equation reached iteration limit ({max_iter}).")

    return get_step(multiplier), 'NearlyExact'


def twod_subspace_step(
        gradient: np.ndarray,
        hessian: np.ndarray,
        delta: float,
        eig_tol: float = None,
        eigen_decomposition: typing.Tuple[np.ndarray, np.ndarray] = None
) -> typing.Tuple[np.ndarray, str]:
    """Two-dimensional subspace approximation of the trust-region step.

    - Positive definite H: the full step if inside, else the subproblem on span[g, full step].
    - Numerically singular H: the Cauchy step.
    - Indefinite H: the shifted step p = -(H - 1.5 nu I)^-1 g with nu = lambda_min. If p is inside, it is
      extended to the boundary along the smallest eigenvector q with q^T g <= 0, else the subproblem on
      span[g, p] is solved.
    - The result is never worse than the Cauchy step in terms of the model value.
    """

    if eig_tol is None:
        eig_tol = nlkansa.config.config['trust_region']['eig_tol']

    try:
        if eigen_decomposition is None:
            eigen_decomposition = get_eigen_decomposition(hessian)
    except (ValueError, np.linalg.LinAlgError) as exception:
        logger.warning(f"Eigenpair estimation failed ({exception}). Taking nearly-exact step.")
        return nearly_exact_step(gradient, hessian, delta)
    eigenvalues, eigenvectors = eigen_decomposition
    eigenvalue_minimum = eigenvalues[0]
    cauchy = cauchy_step(gradient, hessian, delta)

    if abs(eigenvalue_minimum) <= eig_tol:
        return cauchy, 'Cauchy'

    if eigenvalue_minimum > eig_tol:
        full_step = -eigenvectors @ ((eigenvectors.T @ gradient) / eigenvalues)
        if np.linalg.norm(full_step) <= delta:
            return full_step, 'Full'
        subspace_direction = full_step
        step = None
    else:
        shift = 1.5 * eigenvalue_minimum
        shifted_step = -eigenvectors @ ((eigenvectors.T @ gradient) / (eigenvalues - shift))
        shifted_step_norm = np.linalg.norm(shifted_step)
        if shifted_step_norm < delta:
            eigenvector = eigenvectors[:, 0]
            if eigenvector @ gradient > 0.0:
                eigenvector = -eigenvector
            projection = float(shifted_step @ eigenvector)
            length = -projection + np.sqrt(projection ** 2 + delta ** 2 - shifted_step_norm ** 2)
            step = shifted_step + length * eigenvector
        else:
            subspace_direction = shifted_step
            step = None

    # Solve subproblem on span[g, direction] in an orthonormal basis.
    if step is None:
        basis, r_factor = scipy.linalg.qr(np.stack([gradient, subspace_direction], axis=1), mode='economic')
        if abs(r_factor[1, 1]) <= 1e-12 * abs(r_factor[0, 0]):
            return cauchy, 'Cauchy'
        step_subspace = nearly_exact_step(basis.T @ gradient, basis.T @ hessian @ basis, delta)[0]
        step = basis @ step_subspace

    # Safeguard against steps worse than the Cauchy step.
    if get_model_value(step, gradient, hessian) > get_model_value(cauchy, gradient, hessian):
        return cauchy, 'Cauchy'

    return step, 'Boundary2D'


def trust_ratio(
        merit_old: float,
        merit_new: float,
        model_drop: float
) -> float:
    """Ratio of actual to predicted merit reduction. Requires positive predicted reduction."""

    if not (model_drop > 0.0):
        logger.error(f"Trust-region step without positive model decrease: {model_drop}")
        raise nlkansa.utils.StepConstructionError(f"Trust-region step without positive model decrease: {model_drop}")

    return (merit_old - merit_new) / model_drop


def apply_scaling(
        jacobian: np.ndarray,
        hessian: np.ndarray,
        gradient: np.ndarray
) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Apply diagonal scaling with Gamma_ii = max(|H_ii|, 1e-8 max_j |H_jj|).

    - Returns J Gamma^-1, Gamma^-1 H Gamma^-1, Gamma^-1 g and the scaling vector Gamma.
    - Steps of the scaled problem map back as step = Gamma^-1 step_scaled.
    """

    diagonal = np.abs(np.diag(hessian))
    if np.max(diagonal) == 0.0:
        scaling = np.ones(len(diagonal))
    else:
        scaling = np.maximum(diagonal, 1e-8 * np.max(diagonal))

    return (
        None if jacobian is None else jacobian / scaling[np.newaxis, :],
        hessian / np.outer(scaling, scaling),
        gradient / scaling,
        scaling
    )


def solve(
        provider,
        config: TrustRegionConfig,
        beta_initial: np.ndarray
) -> SolveReport:
    """Minimize the merit function with the trust-region algorithm.

    - rho < 1/4 shrinks the radius to delta / 4. rho > 3/4 with a step on the boundary doubles the radius up to
      the maximum radius. The step is accepted iff rho > eta.
    - Non-finite merit at a trial point counts as rho = -inf.
    - A step without positive predicted reduction, e.g. through underflow near the radius collapse, is rejected.
    - Stops once the relative merit drop over the last `stagnation_window` accepted steps is below
      `stagnation_tolerance`, once the radius collapses below machine precision or once the gradient vanishes.
      These stops count as convergence only with merit below the merit floor, and as stagnation otherwise.
    """

    time_start = time.time()
    logger.debug(f"Starting trust-region solve with {config.method} (scaling: {config.scaling}).")

    beta = np.array(beta_initial, dtype=float)
    if not np.all(np.isfinite(beta)):
        logger.error("Initial coefficients are not finite.")
        raise nlkansa.utils.EvaluationError("Initial coefficients are not finite.")
    state = provider.get_merit_state(beta, with_hessian=config.requires_hessian)
    if not np.isfinite(state.merit):
        logger.error(f"Merit at the initial coefficients is not finite: {state.merit}")
        raise nlkansa.utils.EvaluationError("Merit at the initial coefficients is not finite.")

    merit_initial = state.merit
    merit_floor = config.merit_floor_factor * max(1.0, merit_initial)
    delta = config.delta_initial
    trace = []
    accepted_merits = [state.merit]
    converged = False
    reason = None

    for iteration in range(config.max_iter):

        # Check stationarity.
        if (state.merit == 0.0) or (np.linalg.norm(state.gradient) == 0.0):
            converged, reason = state.merit < merit_floor, 'Stagnated'
            break

        # Obtain scaled model.
        jacobian, hessian, gradient = state.jacobian, state.hessian, state.gradient
        scaling = None
        if config.scaling:
            jacobian, hessian, gradient, scaling = apply_scaling(jacobian, hessian, gradient)

        # Obtain step.
        hessian_positive_definite = None
        eigen_decomposition = None
        try:
            if config.method == 'dogleg':
                step, step_kind = dogleg_step(gradient, jacobian, delta)
            else:
                eigen_decomposition = get_eigen_decomposition(hessian)
                hessian_positive_definite = bool(eigen_decomposition[0][0] > 0.0)
                if config.method == 'nearly_exact':
                    step, step_kind = nearly_exact_step(gradient, hessian, delta, eigen_decomposition)
                else:
                    step, step_kind = twod_subspace_step(
                        gradient, hessian, delta, config.eig_tol, eigen_decomposition
                    )
        except (ValueError, np.linalg.LinAlgError) as exception:
            logger.warning(f"Trust-region subproblem failed ({exception}). Taking Cauchy step.")
            step, step_kind = None, 'Cauchy'

        # Obtain model decrease, with Cauchy fallback.
        model_jacobian = jacobian if config.method == 'dogleg' else None
        model_drop = (
            -get_model_value(step, gradient, hessian, model_jacobian)
            if step is not None else -np.inf
        )
        if not (model_drop > 0.0):
            if step is not None:
                logger.warning(f"Step '{step_kind}' without model decrease ({model_drop}). Taking Cauchy step.")
            step = cauchy_step(gradient, hessian, delta, jacobian=model_jacobian)
            step_kind = 'Cauchy'
            model_drop = -get_model_value(step, gradient, hessian, model_jacobian)
        step_norm = float(np.linalg.norm(step))
        step_unscaled = step if scaling is None else step / scaling

        # Obtain trust ratio.
        beta_trial = beta + step_unscaled
        try:
            merit_trial = provider.get_merit(beta_trial)
        except nlkansa.utils.EvaluationError:
            merit_trial = np.inf
        if not (model_drop > 0.0):
            logger.warning(f"Cauchy step without model decrease ({model_drop}). Rejecting step.")
            rho = -np.inf
        elif np.isfinite(merit_trial):
            rho = trust_ratio(state.merit, merit_trial, model_drop)
        else:
            rho = -np.inf
        accepted = bool(rho > config.eta)

        trace.append(IterationRecord(
            iteration, state.merit, delta, rho, step_kind, step_norm, accepted, hessian_positive_definite
        ))
        logger.debug(
            f"Iteration {iteration}: mu = {state.merit:.6e}, delta = {delta:.3e}, rho = {rho:.3e}, "
            f"step = {step_kind}, |step| = {step_norm:.3e}, accepted = {accepted}"
        )

        # Update radius.
        if rho < 0.25:
            delta = 0.25 * delta
        elif (rho > 0.75) and (abs(step_norm - delta) <= 1e-10 * delta):
            delta = min(2.0 * delta, config.delta_max)

        # Update iterate.
        if accepted:
            beta = beta_trial
            try:
                state = provider.get_merit_state(beta, with_hessian=config.requires_hessian)
            except nlkansa.utils.EvaluationError as exception:
                logger.warning(f"Non-finite evaluation at accepted iterate: {exception}")
                reason = 'NonFinite'
                break
            accepted_merits.append(state.merit)
            if len(accepted_merits) > config.stagnation_window:
                merit_reference = accepted_merits[-config.stagnation_window - 1]
                relative_drop = (
                    (merit_reference - state.merit) / merit_reference if merit_reference > 0.0 else 0.0
                )
                if relative_drop < config.stagnation_tolerance:
                    converged, reason = state.merit < merit_floor, 'Stagnated'
                    break

        # Radius collapse.
        beta_norm = np.linalg.norm(beta if scaling is None else beta * scaling)
        if delta < nlkansa.config.machine_epsilon * max(1.0, beta_norm):
            converged, reason = state.merit < merit_floor, 'Stagnated'
            break
    else:
        if (state.merit == 0.0) or (np.linalg.norm(state.gradient) == 0.0):
            converged, reason = state.merit < merit_floor, 'Stagnated'
        else:
            logger.warning(f"Trust-region solve reached the iteration limit ({config.max_iter}).")
            reason = 'MaxIter'
            converged = state.merit < merit_floor

    # Obtain condition numbers at the final iterate.
    jacobian_condition = nlkansa.utils.get_condition_number(state.jacobian) if (
        state.jacobian.shape[0] == state.jacobian.shape[1]
    ) else np.nan
    hessian_condition = (
        nlkansa.utils.get_condition_number(state.hessian) if state.hessian is not None else None
    )

    report = SolveReport(
        trace, beta, state.merit, merit_initial, bool(converged), reason,
        jacobian_condition=jacobian_condition,
        hessian_condition=hessian_condition,
        solve_time=time.time() - time_start
    )
    logger.debug(
        f"Completed trust-region solve in {report.iterations} iterations: mu = {report.merit:.6e}, "
        f"converged = {report.converged}, reason = {report.reason}."
    )

    return report
