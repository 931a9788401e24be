"""Equilibria of the market whose real-time generator bids are replaced by
default cost-based bids.
"""

import typing

import numpy as np

from marketlab.equilibria import common
from marketlab.market import (Behavior, EquilibriumResult, FloatMap,
                              MarketConfig, Regime)


def competitive_rt_mpm(
    cfg: MarketConfig,
    da_load_split: typing.Optional[FloatMap] = None
) -> EquilibriumResult:
    """The competitive equilibrium: both stages clear at ``d / sum(1 / c)``.

    Day-ahead intercepts are free as long as they clear at that price; the
    representative schedules day-ahead dispatch in proportion to ``1 / c_j``.
    Real-time intercepts record the bids that would reproduce the default
    dispatch.

    Args:
        cfg
            Market configuration.
        da_load_split
            Day-ahead quantity of every load; by default loads buy all of
            their demand in real time.
    """
    price = common.system_price(cfg)
    load_da = common.resolve_split(cfg, da_load_split, 0.0)
    g_da = common.proportional_dispatch(cfg, float(np.sum(load_da)))
    g_rt = price / cfg.costs - g_da
    bids = common.intercept_bids(
        cfg,
        cfg.slope_da * price - g_da,
        cfg.slope_rt * price - g_rt,
        load_da
    )
    return common.result(
        Regime.RT_MPM,
        Behavior.COMPETITIVE,
        common.stage(cfg, price, g_da, bids.load_da),
        common.stage(cfg, price, g_rt, bids.load_rt),
        bids,
        degrees_of_freedom=(
            'Day-ahead intercepts are free subject to clearing at the system '
            'marginal price; the split of load between stages is free '
            '(default: all real-time).'
        ),
        symmetric=cfg.is_homogeneous
    )


def nash_rt_mpm(cfg: MarketConfig) -> EquilibriumResult:
    """The unique Nash equilibrium, for any cost coefficients.

    Loads buy everything in real time, day-ahead intercepts ``b_d * d /
    sum(1 / c)`` clear no quantity at the system marginal price, and the
    default real-time bids dispatch ``d / (c_j * sum(1 / c))``.

    Raises:
        TooFewGenerators: The market has a single generator.
    """
    common.require_generators(cfg, 2, 'the real-time-mitigated Nash equilibrium')
    price = common.system_price(cfg)
    num_gens = cfg.num_generators
    g_rt = price / cfg.costs
    bids = common.intercept_bids(
        cfg,
        np.full(num_gens, cfg.slope_da * price),
        cfg.slope_rt * price - g_rt,
        np.zeros(cfg.num_loads)
    )
    return common.result(
        Regime.RT_MPM,
        Behavior.NASH,
        common.stage(cfg, price, np.zeros(num_gens), bids.load_da),
        common.stage(cfg, price, g_rt, bids.load_rt),
        bids,
        symmetric=cfg.is_homogeneous
    )
