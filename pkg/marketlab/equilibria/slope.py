"""Equilibria of the standard market when generators bid supply-function
slopes instead of intercepts.
"""

import typing

import numpy as np

from marketlab import clearing
from marketlab.equilibria import common
from marketlab.errors import InvalidSlope
from marketlab.market import (Behavior, EquilibriumResult, MarketConfig,
                              Regime)


def competitive_slope(
    cfg: MarketConfig,
    split_choice: typing.Optional[float] = None
) -> EquilibriumResult:
    """The competitive equilibrium: each generator's slopes sum to ``1 /
    c_j`` and both stages clear at ``d / sum(1 / c)``.

    Args:
        cfg
            Market configuration.
        split_choice
            Fraction of every generator's slope, and of every load's demand,
            placed day-ahead; ``1`` by default.

    Raises:
        InvalidSlope: ``split_choice`` lies outside ``[0, 1]``.
    """
    fraction = 1.0 if split_choice is None else float(split_choice)
    if not 0 <= fraction <= 1:
        raise InvalidSlope(f'split_choice must lie in [0, 1], got {fraction}')
    price = common.system_price(cfg)
    bids = common.slope_bids(
        cfg,
        fraction / cfg.costs,
        (1 - fraction) / cfg.costs,
        fraction * cfg.demands
    )
    return common.result(
        Regime.SLOPE_STANDARD,
        Behavior.COMPETITIVE,
        common.stage(cfg, price, fraction * price / cfg.costs, bids.load_da,
                     degenerate=fraction == 0),
        common.stage(cfg, price, (1 - fraction) * price / cfg.costs,
                     bids.load_rt, degenerate=fraction == 1),
        bids,
        degrees_of_freedom=(
            'Each generator\'s slopes are determined only through their sum '
            '1 / c_j and the split of load between stages is free '
            f'(representative: fraction {fraction:g} day-ahead).'
        ),
        symmetric=cfg.is_homogeneous
    )


def nash_slope(cfg: MarketConfig) -> EquilibriumResult:
    """The symmetric Nash equilibrium among at least three identical slope
    bidders.

    Every load buys the same quantity day-ahead regardless of its demand, and
    the day-ahead price is a fraction ``|L| / (|L| + 1)`` of the real-time
    price.

    The slopes solve the real-time and load conditions. They do not solve a
    generator's day-ahead condition with the other bids held fixed, which
    would need equal stage prices at this dispatch, so
    :py:func:`marketlab.verifier.verify_equilibrium` reports a generator
    deviation.

    Raises:
        TooFewGenerators: The market has fewer than three generators.
        HeterogeneousUnsupported: Generators' costs differ.
    """
    common.require_generators(cfg, 3, 'slope-bid Nash')
    c = cfg.homogeneous_cost()
    num_gens = cfg.num_generators
    loads = cfg.num_loads
    n = num_gens - 1
    demand = cfg.aggregate_demand

    slope_da = (loads * n + 1) / (loads * n) * (num_gens - 2) / n / c
    slope_rt = 1 / (loads + 1) * (num_gens - 2) ** 2 / n ** 2 / c
    per_load_da = (loads * n + 1) / (loads * (loads + 1) * n) * demand
    price_rt = n / (num_gens - 2) * c / num_gens * demand
    price_da = loads / (loads + 1) * price_rt

    bids = common.slope_bids(
        cfg,
        np.full(num_gens, slope_da),
        np.full(num_gens, slope_rt),
        np.full(loads, per_load_da)
    )
    day_ahead = clearing.clear_slope_stage(bids.gen_slopes_da or {},
                                           bids.load_da)
    real_time = clearing.clear_slope_stage(bids.gen_slopes_rt or {},
                                           bids.load_rt)
    return common.result(
        Regime.SLOPE_STANDARD,
        Behavior.NASH,
        day_ahead._replace(price=price_da),
        real_time._replace(price=price_rt),
        bids
    )
