"""Application programming interface (API) module for high-level interface functions to run experiments."""

import glob
import itertools
import numpy as np
import os
import pandas as pd
import time
import typing
import yaml

import nlkansa.config
import nlkansa.geometry
import nlkansa.operator_newton
import nlkansa.problems
import nlkansa.rbf_kernels
import nlkansa.system
import nlkansa.trust_region
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

# Column order of metrics tables.
metrics_columns = [
    'name',
    'problem',
    'kernel',
    'shape',
    'method',
    'node_count',
    'unknown_count',
    'fill_distance',
    'merit',
    'rms_error',
    'max_error',
    'rms_residual',
    'max_residual',
    'rms_collocation_residual',
    'max_collocation_residual',
    'jacobian_condition',
    'hessian_condition',
    'iterations',
    'accepted_steps',
    'converged',
    'reason',
    'convex',
    'error',
    'wall_time'
]

# Transformations for figure data exports.
figure_transforms = {
    None: lambda values: values,
    'log10': np.log10,
    'sqrt': np.sqrt
}


class RunConfig(nlkansa.utils.ObjectBase):
    """Run configuration object, describing one experiment.

    - `problem`: Problem type and parameters, e.g. ``{'type': 'plateau', 'margin': 0.1}``. Given as string, the
      problem catalog entry of that identifier supplies the problem and the defaults of all other sections.
    - `kernel`: Keyword arguments of `nlkansa.rbf_kernels.KernelSpec`, where `dim` defaults to the problem dimension.
    - `pointset`: Pointset recipe with `type` one of 'grid', 'disc', 'mold', 'file' and the generator arguments.
    - `guess`: Initial guess with `strategy` and optional `perturbation`, `seed` and `poisson_source`.
    - `solver`: Solver with `method` one of the trust-region method names or 'operator_newton', `jacobian` one of
      'analytic', 'finite_difference', optional `eliminate` and overrides of the solver configuration.
    - `evaluation_count`: Size of the evaluation set.
    - `seed`: Seed for scattered nodes, random guesses and the evaluation set.
    """

    name: str
    problem: dict
    kernel: dict
    pointset: dict
    guess: dict
    solver: dict
    evaluation_count: int
    seed: int
    results_path: typing.Optional[str]

    def __init__(
            self,
            problem: typing.Union[str, dict],
            kernel: dict = None,
            pointset: dict = None,
            guess: dict = None,
            solver: dict = None,
            evaluation_count: int = None,
            seed: int = None,
            name: str = None,
            results_path: str = None
    ):

        # Obtain defaults from problem catalog.
        if isinstance(problem, str):
            catalog = nlkansa.problems.get_catalog()
            if problem not in catalog:
                logger.error(f"Unknown problem identifier: {problem}. Choices: {list(catalog)}")
                raise nlkansa.utils.ConfigurationError(f"Unknown problem identifier: {problem}")
            defaults = catalog[problem].default_config
            name = problem if name is None else name
            problem = defaults['problem']
            kernel = nlkansa.config.merge_config(defaults['kernel'], kernel or dict())
            pointset = nlkansa.config.merge_config(defaults['pointset'], pointset or dict())
            guess = nlkansa.config.merge_config(defaults['guess'], guess or dict())

        run_defaults = nlkansa.config.config['runs']
        self.problem = dict(problem)
        self.kernel = dict(kernel or dict())
        self.pointset = dict(pointset or dict())
        self.guess = dict(guess or dict(strategy='zero'))
        self.solver = nlkansa.config.merge_config(
            dict(method='dogleg', jacobian='analytic'),
            solver or dict()
        )
        self.evaluation_count = int(run_defaults['evaluation_count'] if evaluation_count is None else evaluation_count)
        self.seed = int(run_defaults['seed'] if seed is None else seed)
        self.name = str(self.problem.get('type') if name is None else name)
        self.results_path = results_path

        # Validate sections.
        for section in ['problem', 'pointset']:
            if 'type' not in getattr(self, section):
                logger.error(f"Run configuration section `{section}` requires a `type`.")
                raise nlkansa.utils.ConfigurationError(f"Run configuration section `{section}` requires a `type`.")
        for key in ['family', 'shape']:
            if key not in self.kernel:
                logger.error(f"Run configuration section `kernel` requires `{key}`.")
                raise nlkansa.utils.ConfigurationError(f"Run configuration section `kernel` requires `{key}`.")
        if (
            (self.solver['method'] != 'operator_newton')
            and (self.solver['method'] not in nlkansa.trust_region.trs_methods)
        ):
            logger.error(f"Unknown solver method: {self.solver['method']}")
            raise nlkansa.utils.ConfigurationError(f"Unknown solver method: {self.solver['method']}")
        if self.solver['jacobian'] not in ['analytic', 'finite_difference']:
            logger.error(f"Unknown Jacobian mode: {self.solver['jacobian']}")
            raise nlkansa.utils.ConfigurationError(f"Unknown Jacobian mode: {self.solver['jacobian']}")
        if self.evaluation_count < 1:
            logger.error(f"Evaluation set size must be positive, but is: {self.evaluation_count}")
            raise nlkansa.utils.ConfigurationError("Evaluation set size must be positive.")

    @classmethod
    def from_dict(
            cls,
            dictionary: dict
    ):

        if not isinstance(dictionary, dict):
            logger.error(f"Run configuration must be a mapping, but got: {type(dictionary).__name__}")
            raise nlkansa.utils.ConfigurationError("Run configuration must be a mapping.")
        if 'problem' not in dictionary:
            logger.error("Run configuration requires a `problem`.")
            raise nlkansa.utils.ConfigurationError("Run configuration requires a `problem`.")
        try:
            return cls(**dictionary)
        except TypeError as exception:
            logger.error(f"Invalid run configuration: {exception}")
            raise nlkansa.utils.ConfigurationError(f"Invalid run configuration: {exception}")

    def to_dict(self) -> dict:
        return dict(
            name=self.name,
            problem=self.problem,
            kernel=self.kernel,
            pointset=self.pointset,
            guess=self.guess,
            solver=self.solver,
            evaluation_count=self.evaluation_count,
            seed=self.seed,
            results_path=self.results_path
        )


class MetricsRow(nlkansa.utils.ObjectBase):
    """Metrics of one run. Error and residual metrics are taken on the evaluation set, the collocation residual on
    the collocation nodes. Metrics which are not available, e.g. errors without exact solution, are NaN.
    """

    values: dict

    def __init__(self, **values):

        unknown_keys = set(values) - set(metrics_columns)
        if len(unknown_keys) > 0:
            logger.error(f"Unknown metrics: {sorted(unknown_keys)}")
            raise nlkansa.utils.ConfigurationError(f"Unknown metrics: {sorted(unknown_keys)}")
        self.values = {column: values.get(column, np.nan) for column in metrics_columns}

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self) -> dict:
        return dict(self.values)


class RunResults(nlkansa.utils.ResultsBase):
    """Results of a single run."""

    run_config: dict
    metrics: pd.DataFrame
    trace: pd.DataFrame
    alpha: np.ndarray


class SweepResults(nlkansa.utils.ResultsBase):
    """Results of a sweep, i.e. one metrics row per run in input order."""

    metrics: pd.DataFrame
    traces: typing.Dict[str, pd.DataFrame]


class ValidationResults(nlkansa.utils.ResultsBase):
    """Results of the finite difference validation suite."""

    problem_id: str
    checks: pd.DataFrame

    @property
    def passed(self) -> bool:
        return bool(self.checks['passed'].all())


def load_run_configs(
        path: str
) -> typing.List[RunConfig]:
    """Load run configurations from a YAML file.

    - A document with `runs` and / or `sweep` yields multiple run configurations, otherwise the document is a
      single run configuration.
    - Each entry of `runs` is merged over `defaults`. Each entry of `sweep` maps a dotted key such as `kernel.shape`
      to a list of values, and all combinations are expanded for each run.
    - Runs without name are named after the document `name` and their index.
    """

    document = load_yaml(path)

    if ('runs' not in document) and ('sweep' not in document):
        return [RunConfig.from_dict(document)]

    defaults = document.get('defaults', dict())
    runs = document.get('runs', [dict()])
    sweep = document.get('sweep', dict())
    if (not isinstance(runs, list)) or (not isinstance(sweep, dict)):
        logger.error(f"Invalid run list or sweep in: {path}")
        raise nlkansa.utils.ConfigurationError(f"Invalid run list or sweep in: {path}")

    run_configs = []
    for run in runs:
        run = nlkansa.config.merge_config(defaults, run)
        for sweep_values in itertools.product(*sweep.values()):
            dictionary = run
            for dotted_key, value in zip(sweep.keys(), sweep_values):
                dictionary = nlkansa.config.merge_config(dictionary, get_nested_dict(dotted_key, value))
            if 'name' not in dictionary:
                dictionary = {**dictionary, 'name': f"{document.get('name', 'run')}_{len(run_configs)}"}
            run_configs.append(RunConfig.from_dict(dictionary))

    return run_configs


def load_yaml(
        path: str
) -> dict:
    """Load YAML mapping from file. Raises parse errors with line number."""

    if not os.path.isfile(path):
        logger.error(f"Configuration file not found: {path}")
        raise nlkansa.utils.ParseError(f"Configuration file not found: {path}")

    try:
        with open(path, 'r') as file:
            document = yaml.safe_load(file)
    except yaml.YAMLError as exception:
        mark = getattr(exception, 'problem_mark', None)
        line_number = None if mark is None else mark.line + 1
        logger.error(f"Invalid YAML in {path}: {exception}")
        raise nlkansa.utils.ParseError(f"Invalid YAML in {path}.", line_number)
    if not isinstance(document, dict):
        logger.error(f"Configuration file must contain a mapping: {path}")
        raise nlkansa.utils.ParseError(f"Configuration file must contain a mapping: {path}")

    return document


def get_nested_dict(
        dotted_key: str,
        value
) -> dict:
    """Obtain nested dictionary from dotted key, e.g. `kernel.shape` to ``{'kernel': {'shape': value}}``."""

    for key in reversed(dotted_key.split('.')):
        value = {key: value}

    return value


def get_problem(
        problem_config: dict,
        pointset_config: dict = None
) -> nlkansa.system.ProblemDefinition:
    """Obtain problem from its configuration. Hele-Shaw problems take the mold geometry from the pointset recipe.

    - Loaded pointsets carry no inlet, hence Motz enrichment on a loaded pointset requires the problem `inlet`.
    """

    parameters = {key: value for key, value in problem_config.items() if key != 'type'}
    if (
        (problem_config['type'] == 'hele_shaw')
        and (pointset_config is not None)
        and (pointset_config.get('type') == 'file')
        and (parameters.get('motz_functions', 0) > 0)
        and ('inlet' not in parameters)
    ):
        logger.error("Motz enrichment on a loaded pointset requires the inlet in the problem configuration.")
        raise nlkansa.utils.ConfigurationError(
            "Motz enrichment on a loaded pointset requires the inlet in the problem configuration."
        )
    if (
        (problem_config['type'] == 'hele_shaw')
        and (pointset_config is not None)
        and (pointset_config.get('type') == 'mold')
    ):
        for key in ['width', 'height', 'inlet']:
            if key in pointset_config:
                parameters.setdefault(key, pointset_config[key])

    return nlkansa.problems.make_problem(problem_config['type'], **parameters)


def get_kernel(
        kernel_config: dict,
        dim: int
) -> nlkansa.rbf_kernels.KernelSpec:

    try:
        return nlkansa.rbf_kernels.KernelSpec(**{'dim': dim, **kernel_config})
    except TypeError as exception:
        logger.error(f"Invalid kernel configuration: {exception}")
        raise nlkansa.utils.ConfigurationError(f"Invalid kernel configuration: {exception}")


def get_pointset(
        pointset_config: dict,
        problem: nlkansa.system.ProblemDefinition = None,
        seed: int = 0
) -> nlkansa.geometry.Pointset:
    """Obtain pointset from its recipe. Disc pointsets default to the problem's radius, e.g. for Plateau problems."""

    parameters = {key: value for key, value in pointset_config.items() if key != 'type'}
    pointset_type = pointset_config['type']

    try:
        if pointset_type == 'grid':
            pointset = nlkansa.geometry.generate_grid(**parameters)
        elif pointset_type == 'disc':
            if ('radius' not in parameters) and hasattr(problem, 'radius'):
                parameters['radius'] = problem.radius
            pointset = nlkansa.geometry.generate_disc(**{'seed': seed, **parameters})
        elif pointset_type == 'mold':
            parameters['inlet'] = tuple(parameters.get('inlet', (0.375, 0.625)))
            pointset = nlkansa.geometry.generate_mold(**{'seed': seed, **parameters})
        elif pointset_type == 'file':
            pointset = nlkansa.geometry.load_pointset(parameters['path'])
        else:
            logger.error(f"Unknown pointset type: {pointset_type}")
            raise nlkansa.utils.ConfigurationError(f"Unknown pointset type: {pointset_type}")
    except (TypeError, KeyError) as exception:
        logger.error(f"Invalid pointset recipe: {exception}")
        raise nlkansa.utils.ConfigurationError(f"Invalid pointset recipe: {exception}")

    return pointset


@nlkansa.config.memoize('get_collocation_system')
def get_collocation_system(
        problem_config: dict,
        kernel_config: dict,
        pointset_config: dict,
        eliminate: bool = None,
        seed: int = 0
) -> nlkansa.system.CollocationSystem:
    """Obtain collocation system from configuration dictionaries. Memoized on disk if caching is enabled."""

    problem = get_problem(problem_config, pointset_config)
    pointset = get_pointset(pointset_config, problem, seed)
    kernel = get_kernel(kernel_config, problem.dim)

    return nlkansa.system.build_system(kernel, pointset, problem, eliminate=eliminate)


def get_initial_guess(
        run_config: RunConfig,
        system: nlkansa.system.CollocationSystem
) -> np.ndarray:
    """Obtain initial reduced coefficients. Operator-Newton runs perturb the full coefficients instead."""

    guess = run_config.guess
    perturbation = guess.get('perturbation')
    seed = guess.get('seed', run_config.seed)
    is_operator_newton = run_config.solver['method'] == 'operator_newton'

    beta = nlkansa.problems.initial_guess(
        guess.get('strategy', 'zero'),
        system,
        seed=seed,
        perturbation=(None if is_operator_newton else perturbation),
        poisson_source=guess.get('poisson_source')
    )
    if is_operator_newton and (perturbation is not None):
        alpha = nlkansa.operator_newton.perturb_coefficients(system.get_coefficients(beta), perturbation, seed)
        beta = system.get_reduced_coefficients(alpha) if system.eliminate else alpha

    return beta


def get_evaluation_metrics(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray,
        evaluation_set: nlkansa.geometry.EvaluationSet
) -> dict:
    """Obtain error and residual metrics of the interpolant with coefficients alpha."""

    points = evaluation_set.points
    metrics = dict()

    with np.errstate(all='ignore'):
        exact_solution = system.problem.get_exact_solution(points)
        if exact_solution is not None:
            error = system.evaluate(alpha, 'u', points) - exact_solution
            metrics['rms_error'] = nlkansa.utils.get_rms(error)
            metrics['max_error'] = float(np.max(np.abs(error)))
        residual = system.get_pde_residual_at(alpha, points)
        metrics['rms_residual'] = nlkansa.utils.get_rms(residual)
        metrics['max_residual'] = float(np.max(np.abs(residual)))
    try:
        collocation_residual = system.get_collocation_residual(alpha)
        metrics['rms_collocation_residual'] = nlkansa.utils.get_rms(collocation_residual)
        metrics['max_collocation_residual'] = float(np.max(np.abs(collocation_residual)))
    except nlkansa.utils.EvaluationError:
        metrics['rms_collocation_residual'] = metrics['max_collocation_residual'] = np.inf

    if isinstance(system.problem, nlkansa.problems.MongeAmpereProblem):
        metrics['convex'] = nlkansa.problems.check_convexity(system, alpha, points)[0]

    return metrics


def solve_run(
        run_config: RunConfig
) -> typing.Tuple[MetricsRow, pd.DataFrame, np.ndarray]:
    """Execute the pipeline of a run and obtain its metrics, iteration trace and final coefficients."""

    time_start = time.time()
    solver = run_config.solver
    is_operator_newton = solver['method'] == 'operator_newton'
    solver_parameters = {
        key: value for key, value in solver.items()
        if key not in ['method', 'jacobian', 'eliminate']
    }

    # Obtain collocation system. Operator-Newton runs in the full coefficient space.
    system = get_collocation_system(
        run_config.problem,
        run_config.kernel,
        run_config.pointset,
        eliminate=(False if is_operator_newton else solver.get('eliminate')),
        seed=run_config.seed
    )
    beta_initial = get_initial_guess(run_config, system)
    evaluation_set = nlkansa.geometry.generate_evaluation_set(
        system.pointset, run_config.evaluation_count, run_config.seed
    )

    # Solve.
    if is_operator_newton:
        solution = nlkansa.operator_newton.OperatorNewtonSolution(
            system, system.get_coefficients(beta_initial), **solver_parameters
        )
        alpha = solution.alpha
        trace = pd.DataFrame(dict(
            k=np.arange(len(solution.residual_history)),
            rms_collocation_residual=solution.residual_history
        ))
        exact_solution = system.problem.get_exact_solution(evaluation_set.points)
        if exact_solution is not None:
            with np.errstate(all='ignore'):
                trace['rms_error'] = [
                    nlkansa.utils.get_rms(system.evaluate(alpha_k, 'u', evaluation_set.points) - exact_solution)
                    for alpha_k in solution.alpha_history
                ]
        try:
            jacobian_condition = nlkansa.utils.get_condition_number(
                nlkansa.operator_newton.get_linearized_matrix(system, alpha)
            )
        except (ValueError, np.linalg.LinAlgError, nlkansa.utils.EvaluationError):
            jacobian_condition = np.nan
        solver_metrics = dict(
            merit=0.5 * (len(system.linear_vector) + len(system.pde_points)) * solution.residual_history[-1] ** 2,
            jacobian_condition=jacobian_condition,
            iterations=solution.iterations,
            accepted_steps=solution.iterations,
            converged=solution.converged,
            reason=solution.reason
        )
    else:
        trust_region_config = nlkansa.trust_region.TrustRegionConfig.from_name(solver['method'], **solver_parameters)
        if solver['jacobian'] == 'finite_difference':
            provider = nlkansa.trust_region.FiniteDifferenceProvider(system)
        else:
            provider = system
        report = nlkansa.trust_region.solve(provider, trust_region_config, beta_initial)
        alpha = system.get_coefficients(report.beta)
        trace = pd.DataFrame(report.get_trace_records())
        solver_metrics = dict(
            merit=report.merit,
            jacobian_condition=report.jacobian_condition,
            hessian_condition=np.nan if report.hessian_condition is None else report.hessian_condition,
            iterations=report.iterations,
            accepted_steps=report.accepted_steps,
            converged=report.converged,
            reason=report.reason
        )

    # Obtain metrics.
    metrics = MetricsRow(
        name=run_config.name,
        problem=repr(system.problem),
        kernel=repr(system.kernel),
        shape=system.kernel.shape,
        method=solver['method'] + ('-fd' if solver['jacobian'] == 'finite_difference' else ''),
        node_count=system.pointset.node_count,
        unknown_count=system.column_count,
        fill_distance=nlkansa.geometry.fill_distance(system.pointset, evaluation_set),
        **solver_metrics,
        **get_evaluation_metrics(system, alpha, evaluation_set),
        wall_time=time.time() - time_start
    )
    logger.debug(f"Completed run '{run_config.name}': {metrics.to_dict()}")

    return metrics, trace, alpha


def run(
        run_config: typing.Union[RunConfig, dict, str],
        store_results: bool = True,
        results_path: str = None
) -> RunResults:
    """Execute a single run and store metrics as CSV and the iteration trace as JSON lines.

    - `run_config` may be given as object, dictionary or path to a YAML file.
    """

    run_config = get_run_config(run_config)

    # Instantiate results directory.
    if results_path is None:
        results_path = run_config.results_path
    if store_results and (results_path is None):
        results_path = nlkansa.utils.get_results_path('run', run_config.name)

    # Obtain results.
    metrics, trace, alpha = solve_run(run_config)
    results = RunResults(
        run_config=run_config.to_dict(),
        metrics=pd.DataFrame([metrics.to_dict()], columns=metrics_columns),
        trace=trace,
        alpha=alpha
    )

    # Store results.
    if store_results:
        os.makedirs(results_path, exist_ok=True)
        results.save(results_path)
        trace.to_json(os.path.join(results_path, 'trace.jsonl'), orient='records', lines=True)
        logger.info(f"Results are stored in: {results_path}")

    return results


def get_run_config(
        run_config: typing.Union[RunConfig, dict, str]
) -> RunConfig:

    if isinstance(run_config, RunConfig):
        return run_config
    elif isinstance(run_config, dict):
        return RunConfig.from_dict(run_config)
    else:
        run_configs = load_run_configs(run_config)
        if len(run_configs) != 1:
            logger.error(f"Expected a single run configuration, but found {len(run_configs)} in: {run_config}")
            raise nlkansa.utils.ConfigurationError(
                f"Expected a single run configuration, but found {len(run_configs)}."
            )
        return run_configs[0]


def get_sweep_row(
        run_config_dict: dict
) -> typing.Tuple[dict, typing.List[dict]]:
    """Obtain metrics row and trace records of a run, with errors isolated into the `error` column."""

    run_config = RunConfig.from_dict(run_config_dict)
    try:
        metrics, trace, _ = solve_run(run_config)
        return metrics.to_dict(), trace.to_dict(orient='records')
    except (
        ArithmeticError,
        ValueError,
        RuntimeError,
        np.linalg.LinAlgError
    ) as exception:
        logger.warning(f"Run '{run_config.name}' failed: {type(exception).__name__}: {exception}")
        return MetricsRow(
            name=run_config.name,
            method=run_config.solver['method'],
            converged=False,
            error=f"{type(exception).__name__}: {exception}"
        ).to_dict(), []


def save_traces(
        traces: typing.Dict[str, pd.DataFrame],
        traces_path: str
):
    """Store iteration traces as JSON lines files, one per run name."""

    os.makedirs(traces_path, exist_ok=True)
    for name, trace in traces.items():
        trace.to_json(os.path.join(traces_path, f'{name}.jsonl'), orient='records', lines=True)


def sweep(
        run_configs: typing.Union[typing.List[RunConfig], str],
        store_results: bool = True,
        results_path: str = None
) -> SweepResults:
    """Execute runs serially or in parallel and aggregate the metrics rows in input order.

    - `run_configs` may be given as list or path to a YAML file, see `load_run_configs`.
    - The iteration trace of each run is stored as `<run name>.jsonl` in the `traces` directory. Failed runs
      yield an empty trace.
    """

    if isinstance(run_configs, str):
        run_configs = load_run_configs(run_configs)
    run_configs = [get_run_config(run_config) for run_config in run_configs]

    # Instantiate results directory.
    if store_results and (results_path is None):
        results_path = nlkansa.utils.get_results_path('sweep')

    # Obtain results.
    rows_and_traces = nlkansa.utils.starmap(
        get_sweep_row,
        [(run_config.to_dict(),) for run_config in run_configs]
    )
    results = SweepResults(
        metrics=pd.DataFrame([row for row, _ in rows_and_traces], columns=metrics_columns),
        traces={
            run_config.name: pd.DataFrame(trace_records)
            for run_config, (_, trace_records) in zip(run_configs, rows_and_traces)
        }
    )

    # Store results.
    if store_results:
        os.makedirs(results_path, exist_ok=True)
        results['metrics'].to_csv(os.path.join(results_path, 'metrics.csv'), index=False)
        save_traces(results['traces'], os.path.join(results_path, 'traces'))
        logger.info(f"Results are stored in: {results_path}")

    return results


def validate(
        problem_id: str,
        seed: int = 0,
        step_factor: float = None
) -> ValidationResults:
    """Compare analytic derivatives against finite difference oracles on the catalog configuration of a problem.

    - Checks the Jacobian, the merit Hessian and its symmetry, the residual partials d1 / d2 at the PDE rows and
      the equivalence of the linearized operator with the full Jacobian.
    """

    catalog = nlkansa.problems.get_catalog()
    if problem_id not in catalog:
        logger.error(f"Unknown problem identifier: {problem_id}. Choices: {list(catalog)}")
        raise nlkansa.utils.ConfigurationError(f"Unknown problem identifier: {problem_id}")
    run_config = RunConfig(problem_id, seed=seed)
    system = get_collocation_system(
        run_config.problem, run_config.kernel, run_config.pointset, seed=run_config.seed
    )
    guess = run_config.guess
    beta = nlkansa.problems.initial_guess(
        guess['strategy'], system, seed=seed, perturbation=guess.get('perturbation', 10.0)
    )
    tolerances = nlkansa.config.config['validation']
    nlkansa.utils.log_time(f"validation of {problem_id}", logger_object=logger)

    # Obtain discrepancies.
    merit_state = system.get_merit_state(beta, with_hessian=True)
    hessian = merit_state.hessian
    d1_discrepancy, d2_discrepancy = nlkansa.system.get_derivative_discrepancy(
        system.problem,
        system.pde_points,
        system.get_component_values(beta),
        step_factor=step_factor
    )
    discrepancies = dict(
        jacobian=nlkansa.system.get_relative_discrepancy(
            merit_state.jacobian,
            nlkansa.system.fd_jacobian(system, beta, step_factor=step_factor)
        ),
        hessian=nlkansa.system.get_relative_discrepancy(
            hessian,
            nlkansa.system.fd_merit_hessian(system, beta, step_factor=step_factor)
        ),
        hessian_symmetry=nlkansa.system.get_relative_discrepancy(hessian, hessian.T),
        residual_d1=d1_discrepancy,
        residual_d2=d2_discrepancy,
        newton_equivalence=nlkansa.operator_newton.check_newton_equivalence(
            system, system.get_coefficients(beta)
        )
    )

    nlkansa.utils.log_time(f"validation of {problem_id}", logger_object=logger)
    checks = pd.DataFrame(
        [
            dict(
                check=check,
                discrepancy=discrepancy,
                tolerance=tolerances[check],
                passed=bool(discrepancy <= tolerances[check])
            )
            for check, discrepancy in discrepancies.items()
        ],
        columns=['check', 'discrepancy', 'tolerance', 'passed']
    )

    return ValidationResults(problem_id=problem_id, checks=checks)


def get_figure_data(
        metrics: pd.DataFrame,
        x: str,
        y: str,
        x_transform: str = None,
        y_transform: str = None,
        query: str = None
) -> pd.DataFrame:
    """Obtain two-column figure data from a metrics table, e.g. log10 RMS(error) against sqrt(N)."""

    if query is not None:
        metrics = metrics.query(query)
    if (x_transform not in figure_transforms) or (y_transform not in figure_transforms):
        logger.error(f"Unknown figure transform: {x_transform}, {y_transform}. Choices: {list(figure_transforms)}")
        raise nlkansa.utils.ConfigurationError(f"Unknown figure transform: {x_transform}, {y_transform}")

    with np.errstate(all='ignore'):
        return pd.DataFrame({
            (x if x_transform is None else f'{x_transform}_{x}'):
                figure_transforms[x_transform](metrics[x].astype(float).to_numpy()),
            (y if y_transform is None else f'{y_transform}_{y}'):
                figure_transforms[y_transform](metrics[y].astype(float).to_numpy())
        })


def get_presets(
        names: typing.List[str] = None,
        include_long: bool = True
) -> typing.Dict[str, dict]:
    """Obtain preset documents from the presets directory, sorted by name."""

    presets = dict()
    for path in sorted(glob.glob(os.path.join(nlkansa.config.config['paths']['presets'], '*.yml'))):
        name = os.path.splitext(os.path.basename(path))[0]
        if (names is not None) and (name not in names):
            continue
        document = load_yaml(path)
        if document.get('long', False) and not include_long:
            logger.debug(f"Skipping long preset: {name}")
            continue
        presets[name] = dict(path=path, document=document)
    if names is not None:
        missing_names = set(names) - set(presets)
        if len(missing_names) > 0:
            logger.error(f"Unknown or skipped presets: {sorted(missing_names)}")
            raise nlkansa.utils.ConfigurationError(f"Unknown or skipped presets: {sorted(missing_names)}")

    return presets


def tables(
        results_path: str = None,
        names: typing.List[str] = None,
        include_long: bool = True
) -> typing.Dict[str, pd.DataFrame]:
    """Run the preset sweeps and store one CSV table per preset along with the figure data exports.

    - Table CSVs omit wall times, which are stored separately, hence reruns yield identical tables.
    - Iteration traces are stored as `<preset>/<run name>.jsonl`.
    """

    if results_path is None:
        results_path = nlkansa.utils.get_results_path('tables')
    os.makedirs(results_path, exist_ok=True)

    results = dict()
    for name, preset in get_presets(names, include_long).items():
        logger.info(f"Running preset: {name}")
        sweep_results = sweep(load_run_configs(preset['path']), store_results=False)
        metrics = sweep_results['metrics']
        save_traces(sweep_results['traces'], os.path.join(results_path, name))
        metrics.drop(columns=['wall_time']).to_csv(os.path.join(results_path, f'{name}.csv'), index=False)
        metrics[['name', 'wall_time']].to_csv(os.path.join(results_path, f'{name}_timing.csv'), index=False)
        for export in preset['document'].get('exports', []):
            figure_data = get_figure_data(
                metrics,
                export['x'],
                export['y'],
                x_transform=export.get('x_transform'),
                y_transform=export.get('y_transform'),
                query=export.get('query')
            )
            figure_data.to_csv(os.path.join(results_path, export['file']), index=False)
        results[name] = metrics

    logger.info(f"Results are stored in: {results_path}")

    return results
