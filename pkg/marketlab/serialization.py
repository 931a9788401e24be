"""Conversion of results to and from their file representations.

Numbers are written as decimal strings with 12 significant digits, so that
identical inputs produce byte-identical files; absent values are ``null``.
"""

import io
import json
import math
import types
import typing

import pandas as pd

from marketlab import utils
from marketlab.errors import ParseError
from marketlab.market import (BidKind, BidProfile, EquilibriumResult,
                              FloatMap, MarketConfig, Stage, validate_bids)
from marketlab.settlement import SettlementReport
from marketlab.sweeps import SweepGrid
from marketlab.verifier import VerificationReport

SIGNIFICANT_DIGITS = 12

JSON_INDENT = 4

JsonObject = typing.Dict[str, typing.Any]


def format_number(value: typing.Optional[float]) -> typing.Optional[str]:
    """Returns ``value`` at 12 significant digits, or ``None`` for a
    missing or ``nan`` value.
    """
    if value is None or math.isnan(value):
        return None
    if value == 0:
        value = 0.0
    return format(float(value), f'.{SIGNIFICANT_DIGITS}g')


def _number_map(values: FloatMap) -> JsonObject:
    return {key: format_number(value) for key, value in values.items()}


def bids_to_dict(bids: BidProfile) -> JsonObject:
    """Returns the ``bids`` layout: each generator's free bid variable and
    each load's quantity, per stage.
    """
    gen_da = bids.generator_bids(Stage.DAY_AHEAD)
    gen_rt = bids.generator_bids(Stage.REAL_TIME)
    return {
        'kind': bids.bid_kind.value,
        'generators': {
            gen_id: {
                Stage.DAY_AHEAD.value: format_number(gen_da[gen_id]),
                Stage.REAL_TIME.value: format_number(gen_rt[gen_id]),
            }
            for gen_id in gen_da
        },
        'loads': {
            load_id: {
                Stage.DAY_AHEAD.value: format_number(bids.load_da[load_id]),
                Stage.REAL_TIME.value: format_number(bids.load_rt[load_id]),
            }
            for load_id in bids.load_da
        },
    }


def bids_from_dict(values: typing.Mapping[str, typing.Any],
                   cfg: MarketConfig) -> BidProfile:
    """Parses the ``bids`` layout written by :py:func:`bids_to_dict`.

    Raises:
        ParseError: A participant of ``cfg`` is missing or a value is not a
            number.
        SplitMismatch: A load's quantities do not add up to its demand.
        InvalidSlope: A slope bid is negative.
    """
    try:
        kind = BidKind(values['kind'])
        generators = values['generators']
        loads = values['loads']

        def column(
            entries: typing.Mapping[str, typing.Any],
            ids: typing.Sequence[str],
            stage: Stage
        ) -> FloatMap:
            return types.MappingProxyType({
                i: float(entries[i][stage.value]) for i in ids
            })

        gen_da = column(generators, cfg.generator_ids, Stage.DAY_AHEAD)
        gen_rt = column(generators, cfg.generator_ids, Stage.REAL_TIME)
        load_da = column(loads, cfg.load_ids, Stage.DAY_AHEAD)
        load_rt = column(loads, cfg.load_ids, Stage.REAL_TIME)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f'Malformed bids: {e!r}') from e

    if kind == BidKind.SLOPE:
        zeros = types.MappingProxyType({i: 0.0 for i in cfg.generator_ids})
        bids = BidProfile(kind, zeros, zeros, load_da, load_rt,
                          gen_slopes_da=gen_da, gen_slopes_rt=gen_rt)
    else:
        bids = BidProfile(kind, gen_da, gen_rt, load_da, load_rt)
    return validate_bids(bids, cfg)


def read_bids(path: str, cfg: MarketConfig) -> BidProfile:
    """Reads a bids file: either the ``bids`` layout itself or an
    equilibrium report holding it under the ``bids`` key.

    Raises:
        ParseError: The file is not valid JSON or the layout is malformed.
    """
    with open(path, encoding='utf8') as f:
        try:
            values = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f'{path} is not valid JSON') from e
    if isinstance(values, dict) and 'kind' not in values:
        values = values.get('bids')
    if not isinstance(values, dict):
        raise ParseError(f'{path} holds no bids')
    return bids_from_dict(values, cfg)


def result_to_dict(eq: EquilibriumResult,
                   report: SettlementReport) -> JsonObject:
    """Returns the equilibrium report: prices, bids, dispatch,
    settlement and a description of any non-uniqueness.
    """
    outcome = eq.outcome
    return {
        'regime': eq.regime.value,
        'behavior': eq.behavior.value,
        'symmetric': eq.symmetric,
        'degrees_of_freedom': eq.degrees_of_freedom,
        'negative_allocations': list(eq.negative_allocations),
        'prices': {
            Stage.DAY_AHEAD.value: format_number(outcome.day_ahead.price),
            Stage.REAL_TIME.value: format_number(outcome.real_time.price),
            'equal': utils.is_close(
                outcome.day_ahead.price, outcome.real_time.price
            ),
        },
        'degenerate': {
            Stage.DAY_AHEAD.value: outcome.day_ahead.degenerate,
            Stage.REAL_TIME.value: outcome.real_time.degenerate,
        },
        'bids': bids_to_dict(outcome.bids),
        'dispatch': {
            gen_id: {
                Stage.DAY_AHEAD.value: format_number(g_da),
                Stage.REAL_TIME.value: format_number(
                    outcome.real_time.gen_dispatch[gen_id]
                ),
            }
            for gen_id, g_da in outcome.day_ahead.gen_dispatch.items()
        },
        'settlement': {
            'profits': _number_map(report.profits),
            'payments': _number_map(report.payments),
            'social_cost': format_number(report.social_cost),
            'aggregate_profit': format_number(report.aggregate_profit),
            'aggregate_payment': format_number(report.aggregate_payment),
        },
    }


def verification_to_dict(report: VerificationReport) -> JsonObject:
    """Converts a verification report to a JSON object."""
    return {
        'verdict': str(report.verdict),
        'verified': report.verdict.verified,
        'participant': report.verdict.participant,
        'gain': format_number(report.verdict.gain),
        'tolerance': format_number(report.tolerance),
        'balance_residuals': {
            stage.value: format_number(value)
            for stage, value in report.balance_residuals.items()
        },
        'foc_residuals': _number_map(report.foc_residuals),
        'best_deviation_gain': _number_map(report.best_deviation_gain),
        'baseline_objectives': _number_map(report.baseline_objectives),
    }


def grid_to_dict(grid: SweepGrid) -> JsonObject:
    """Mirrors a :py:class:`~marketlab.sweeps.SweepGrid`; ``cells[i][j]``
    belongs to the i-th x value and the j-th y value.
    """
    return {
        'label': grid.label,
        'metric': grid.metric.value,
        'x_axis': {
            'label': grid.x_axis.label,
            'values': [format_number(x) for x in grid.x_axis.values],
        },
        'y_axis': {
            'label': grid.y_axis.label,
            'values': [format_number(y) for y in grid.y_axis.values],
        },
        'cells': [
            [format_number(float(value)) for value in row]
            for row in grid.cells
        ],
    }


def dumps(values: typing.Any) -> str:
    """Serializes a JSON value deterministically."""
    return json.dumps(values, indent=JSON_INDENT) + '\n'


def grids_to_csv(grids: typing.Sequence[SweepGrid]) -> str:
    """Returns the CSV form of one or more grids: header ``x,y,value`` with
    one row per cell, preceded by a ``grid`` column when there are several
    grids. Absent cells read ``null``.
    """
    rows = []
    for grid in grids:
        for x, y, value in grid.iter_cells():
            row = {
                'x': format_number(x),
                'y': format_number(y),
                'value': format_number(value),
            }
            if len(grids) > 1:
                row = {'grid': grid.label, **row}
            rows.append(row)
    columns = (['grid'] if len(grids) > 1 else []) + ['x', 'y', 'value']
    stream = io.StringIO()
    pd.DataFrame(rows, columns=columns).to_csv(
        stream, index=False, na_rep='null', lineterminator='\n'
    )
    return stream.getvalue()
