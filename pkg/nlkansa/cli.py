"""Command line interface module.

Verbs:

- `run --config <file>`: Single run, stores metrics CSV and trace JSON lines.
- `sweep --config <file>`: Multiple runs, stores one metrics CSV and one trace per run.
- `validate --problem <id>`: Finite difference validation suite for a catalog problem.
- `tables --out <dir>`: Preset sweeps with one CSV per table, the run traces and the figure data exports.

Exit codes are 0 on success, 1 on solve or validation failure and 2 on configuration errors. Errors are reported
as a single JSON object on stderr.
"""

import argparse
import json
import numpy as np
import sys
import typing

import nlkansa.api
import nlkansa.config
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

exit_success = 0
exit_failure = 1
exit_configuration_error = 2

# Exceptions which are reported as configuration errors.
configuration_errors = (
    nlkansa.utils.ConfigurationError,
    nlkansa.utils.DomainError,
    nlkansa.utils.ParseError,
    nlkansa.utils.ValidationError,
    OSError
)


def get_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(
        prog='nlkansa',
        description="Trust-region and operator-Newton solvers for RBF collocation of nonlinear elliptic problems."
    )
    subparsers = parser.add_subparsers(dest='verb', required=True)

    run_parser = subparsers.add_parser('run', help="Execute a single run.")
    run_parser.add_argument('--config', required=True, help="Run configuration YAML file.")
    run_parser.add_argument('--out', default=None, help="Results directory. Defaults to a new timestamped directory.")

    sweep_parser = subparsers.add_parser('sweep', help="Execute multiple runs and aggregate the metrics.")
    sweep_parser.add_argument('--config', required=True, help="Sweep configuration YAML file.")
    sweep_parser.add_argument('--out', default=None, help="Results directory. Defaults to a new timestamped directory.")

    validate_parser = subparsers.add_parser('validate', help="Check analytic derivatives by finite differences.")
    validate_parser.add_argument('--problem', required=True, help="Problem catalog identifier.")
    validate_parser.add_argument('--seed', type=int, default=0, help="Seed of the random coefficients.")

    tables_parser = subparsers.add_parser('tables', help="Regenerate all preset tables.")
    tables_parser.add_argument(
        '--out', default=None, help="Results directory. Defaults to a new timestamped directory."
    )
    tables_parser.add_argument(
        '--preset', action='append', default=None, dest='presets',
        help="Preset name, may be repeated. Defaults to all presets."
    )
    tables_parser.add_argument('--skip-long', action='store_true', help="Skip presets marked as long.")

    return parser


def report_error(exception: BaseException):
    """Write error report as JSON object to stderr."""

    sys.stderr.write(json.dumps(dict(error=type(exception).__name__, message=str(exception))) + '\n')


def main(arguments: typing.List[str] = None) -> int:

    parser = get_parser()
    arguments = parser.parse_args(arguments)

    try:
        if arguments.verb == 'run':
            results = nlkansa.api.run(arguments.config, results_path=arguments.out)
            metrics = results['metrics']
            print(metrics.to_csv(index=False), end='')
            return exit_success if bool(metrics['converged'].iloc[0]) else exit_failure

        elif arguments.verb == 'sweep':
            results = nlkansa.api.sweep(arguments.config, results_path=arguments.out)
            metrics = results['metrics']
            print(metrics.to_csv(index=False), end='')
            return exit_success if metrics['error'].isna().all() else exit_failure

        elif arguments.verb == 'validate':
            results = nlkansa.api.validate(arguments.problem, seed=arguments.seed)
            print(results['checks'].to_csv(index=False), end='')
            return exit_success if results.passed else exit_failure

        elif arguments.verb == 'tables':
            tables = nlkansa.api.tables(
                results_path=arguments.out,
                names=arguments.presets,
                include_long=not arguments.skip_long
            )
            has_errors = any(not table['error'].isna().all() for table in tables.values())
            return exit_failure if has_errors else exit_success

    except configuration_errors as exception:
        report_error(exception)
        return exit_configuration_error
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exception:
        report_error(exception)
        return exit_failure

    return exit_configuration_error


if __name__ == '__main__':
    sys.exit(main())
