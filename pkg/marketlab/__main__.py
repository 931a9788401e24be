#!/usr/bin/env python3
"""Command-line front end: ``python -m marketlab {equilibrium,verify,sweep}``.

Flags naming a path, format or tolerance fall back to ``MARKETLAB_*``
environment variables.
"""

import argparse
import logging
import os
import sys
import typing

from marketlab import serialization, sweeps
from marketlab.equilibria import solve_equilibrium
from marketlab.errors import InvalidRange, MarketError, ParseError
from marketlab.market import (Behavior, EquilibriumResult, MarketConfig,
                              Regime, load_demand_bids, read_config,
                              validate_config)
from marketlab.mechanism import create_mechanism
from marketlab.settlement import settle
from marketlab.verifier import DEFAULT_TOLERANCE, verify_equilibrium

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MARKET_ERROR = 2
EXIT_VIOLATED = 3

ENV_PREFIX = 'MARKETLAB_'


def _env(name: str, default: typing.Optional[str] = None) \
        -> typing.Optional[str]:
    return os.environ.get(ENV_PREFIX + name, default)


def parse_counts(text: str) -> typing.List[int]:
    """Parses ``"2:25"`` (inclusive) or ``"1,2,5"`` into participant counts.

    Raises:
        InvalidRange: The text is neither form.
    """
    try:
        if ':' in text:
            start, stop = (int(part) for part in text.split(':'))
            return list(range(start, stop + 1))
        return [int(part) for part in text.split(',')]
    except ValueError as e:
        raise InvalidRange(f'Cannot read counts from {text!r}') from e


def parse_reals(text: str) -> typing.List[float]:
    """Parses ``"0.5,1,2"`` into reals.

    Raises:
        InvalidRange: An entry is not a number.
    """
    try:
        return [float(part) for part in text.split(',')]
    except ValueError as e:
        raise InvalidRange(f'Cannot read values from {text!r}') from e


def _add_config_arguments(parser: argparse.ArgumentParser,
                          required: bool) -> None:
    parser.add_argument(
        '--config',
        default=_env('CONFIG'),
        required=required and _env('CONFIG') is None,
        help='market configuration JSON [$MARKETLAB_CONFIG]'
    )
    parser.add_argument(
        '--demand-csv',
        default=_env('DEMAND_CSV'),
        help='replace the configured loads by the rows of a load_id,demand_mw '
             'CSV [$MARKETLAB_DEMAND_CSV]'
    )
    parser.add_argument(
        '--output',
        default=_env('OUTPUT'),
        help='output path, standard output by default [$MARKETLAB_OUTPUT]'
    )


def _add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--regime', required=True,
                        choices=[r.value for r in Regime])
    parser.add_argument('--behavior', required=True,
                        choices=[b.value for b in Behavior])


def build_parser() -> argparse.ArgumentParser:
    """Builds the parser of all subcommands."""
    parser = argparse.ArgumentParser(prog='marketlab')
    parser.add_argument('--verbose', action='store_true')
    commands = parser.add_subparsers(dest='command', required=True)

    equilibrium = commands.add_parser(
        'equilibrium', help='solve and settle an equilibrium'
    )
    _add_config_arguments(equilibrium, required=True)
    _add_solver_arguments(equilibrium)

    verify = commands.add_parser(
        'verify', help='check that an equilibrium is a fixed point'
    )
    _add_config_arguments(verify, required=True)
    _add_solver_arguments(verify)
    verify.add_argument(
        '--tolerance',
        type=float,
        default=_env('TOLERANCE', str(DEFAULT_TOLERANCE)),
        help='relative tolerance on deviation gains [$MARKETLAB_TOLERANCE]'
    )
    verify.add_argument(
        '--bids',
        help='bids JSON replacing the solver\'s bids before verification'
    )

    sweep = commands.add_parser('sweep', help='evaluate a parameter grid')
    sweep.add_argument('mode', choices=['participants', 'slopes',
                                        'mechanisms'])
    _add_config_arguments(sweep, required=False)
    sweep.add_argument('--format', choices=['csv', 'json'],
                       default=_env('FORMAT', 'csv'),
                       help='output format [$MARKETLAB_FORMAT]')
    sweep.add_argument('--regime', choices=[r.value for r in Regime],
                       default=Regime.DA_MPM.value)
    sweep.add_argument('--metric', choices=[m.value for m in sweeps.Metric],
                       default=sweeps.Metric.PROFIT_RATIO.value)
    sweep.add_argument('--generators', default='2:25',
                       help='generator counts, "a:b" or "a,b,..."')
    sweep.add_argument('--loads', default='1:25',
                       help='load counts, "a:b" or "a,b,..."')
    sweep.add_argument('--slope', type=float,
                       help='both stage slopes of a participants sweep')
    sweep.add_argument('--slopes-da', default='1,2,5,10,20,50',
                       help='day-ahead slopes of a slopes sweep')
    sweep.add_argument('--slopes-rt', default='1,2,5,10,20,50',
                       help='real-time slopes of a slopes sweep')
    sweep.add_argument('--b-values',
                       help='intercept slopes of a mechanisms sweep')
    sweep.add_argument('--epsilon', type=float, default=0.025,
                       help='slope spread of a mechanisms sweep')
    return parser


def load_config(args: argparse.Namespace) -> MarketConfig:
    """Reads the configuration named by ``--config``, with its loads
    replaced by ``--demand-csv`` when given.
    """
    if args.config is None:
        cfg = sweeps.case_study_config()
    else:
        cfg = read_config(args.config)
    if args.demand_csv is not None:
        cfg = validate_config(
            cfg._replace(loads=tuple(load_demand_bids(args.demand_csv)))
        )
    return cfg


def _write(args: argparse.Namespace, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
        return
    with open(args.output, 'w', encoding='utf8', newline='') as f:
        f.write(text)


def cmd_equilibrium(args: argparse.Namespace) -> int:
    """Solves one equilibrium and writes it with its settlement."""
    cfg = load_config(args)
    eq = solve_equilibrium(cfg, Regime(args.regime), Behavior(args.behavior))
    _write(args, serialization.dumps(
        serialization.result_to_dict(eq, settle(eq.outcome, cfg))
    ))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Verifies the solver's equilibrium, or the bids of ``--bids``."""
    cfg = load_config(args)
    regime, behavior = Regime(args.regime), Behavior(args.behavior)
    if args.bids is None:
        eq = solve_equilibrium(cfg, regime, behavior)
    else:
        mechanism = create_mechanism(regime)
        bids = serialization.read_bids(args.bids, cfg)
        if bids.bid_kind != mechanism.BID_KIND:
            raise ParseError(
                f'{bids.bid_kind.value} bids do not fit the {regime.value} '
                f'regime'
            )
        eq = EquilibriumResult(
            regime=regime,
            behavior=behavior,
            outcome=mechanism.clear(cfg, bids),
            degrees_of_freedom='',
            symmetric=cfg.is_homogeneous
        )
    report = verify_equilibrium(eq, cfg, tolerance=args.tolerance)
    _write(args, serialization.dumps(
        serialization.verification_to_dict(report)
    ))
    if not report.verdict.verified:
        print(report.verdict, file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Runs one of the parameter sweeps."""
    cfg = load_config(args)
    metric = sweeps.Metric(args.metric)
    if args.mode == 'participants':
        grids = [sweeps.sweep_participants(
            cfg,
            parse_counts(args.generators),
            parse_counts(args.loads),
            Regime(args.regime),
            metric,
            slope=args.slope
        )]
    elif args.mode == 'slopes':
        grids = [sweeps.sweep_slopes(
            cfg, parse_reals(args.slopes_da), parse_reals(args.slopes_rt)
        )]
    else:
        b_values = (
            parse_reals(args.b_values) if args.b_values is not None
            else sweeps.slope_choices(
                float(cfg.costs.mean()), args.epsilon
            )
        )
        grids = sweeps.compare_mechanisms(
            cfg,
            b_values,
            parse_counts(args.generators),
            parse_counts(args.loads),
            metric
        )

    if args.format == 'json':
        values: typing.Any = [serialization.grid_to_dict(g) for g in grids]
        _write(args, serialization.dumps(
            values[0] if len(values) == 1 else values
        ))
    else:
        _write(args, serialization.grids_to_csv(grids))
    return EXIT_OK


_COMMANDS = {
    'equilibrium': cmd_equilibrium,
    'verify': cmd_verify,
    'sweep': cmd_sweep,
}


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(levelname)s %(name)s: %(message)s'
    )
    try:
        return _COMMANDS[args.command](args)
    except (MarketError, OSError) as e:
        logger.debug('Command failed', exc_info=True)
        print(f'error: {type(e).__name__}: {e}', file=sys.stderr)
        return EXIT_MARKET_ERROR


if __name__ == '__main__':
    sys.exit(main())
