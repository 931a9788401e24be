"""Equilibria of the market whose day-ahead generator bids are replaced by
default cost-based bids, leaving generators to compete in real time.
"""

import math

import numpy as np

from marketlab.equilibria import common
from marketlab.market import (Behavior, EquilibriumResult, MarketConfig,
                              Regime)


def competitive_da_mpm(cfg: MarketConfig) -> EquilibriumResult:
    """The unique competitive equilibrium: all load clears day-ahead at
    ``d / sum(1 / c)`` and nothing is traded in real time.

    Only aggregate day-ahead load is pinned down; the representative has
    every load buy its whole demand day-ahead.
    """
    price = common.system_price(cfg)
    g_da = price / cfg.costs
    num_gens = cfg.num_generators
    bids = common.intercept_bids(
        cfg,
        np.full(num_gens, cfg.slope_da * price),
        np.full(num_gens, cfg.slope_rt * price),
        cfg.demands
    )
    return common.result(
        Regime.DA_MPM,
        Behavior.COMPETITIVE,
        common.stage(cfg, price, g_da, bids.load_da),
        common.stage(cfg, price, np.zeros(num_gens), bids.load_rt),
        bids,
        degrees_of_freedom=(
            'Per-load day-ahead quantities are free subject to the aggregate '
            'equalling total demand.'
        ),
        symmetric=cfg.is_homogeneous
    )


def nash_da_mpm(cfg: MarketConfig) -> EquilibriumResult:
    """The unique Stackelberg-Nash equilibrium with loads leading day-ahead
    and generators following in real time.

    Writing ``C_j = 1 / (b_r (n - 1)) + c_j`` and ``R = sum(1 / C) /
    sum(1 / c)``, a fraction ``R / (|L| + 1)`` of demand is left to real
    time, where prices exceed day-ahead prices by ``d / ((|L| + 1) *
    sum(1 / c))``. The day-ahead intercepts reported are those of the
    closed form; clearing under this regime ignores them.

    Raises:
        TooFewGenerators: The market has a single generator.
    """
    common.require_generators(cfg, 2, 'the day-ahead-mitigated Nash equilibrium')
    demand = cfg.aggregate_demand
    inverse_sum = cfg.inverse_cost_sum
    augmented_inverse = 1 / (
        1 / (cfg.slope_rt * (cfg.num_generators - 1)) + cfg.costs
    )
    ratio = math.fsum(augmented_inverse) / inverse_sum
    share = 1 / (cfg.num_loads + 1)
    unit = demand / inverse_sum

    g_da = (1 - ratio * share) * unit / cfg.costs
    g_rt = share * unit * augmented_inverse
    beta_da = (
        cfg.slope_da - cfg.slope_da * ratio * share
        - share * augmented_inverse
    ) * unit
    load_da = cfg.demands + (demand * share - cfg.demands) * ratio
    price_da = unit - ratio * share * unit
    price_rt = price_da + share * unit

    bids = common.intercept_bids(
        cfg,
        beta_da,
        cfg.slope_rt * price_rt - g_rt,
        load_da
    )
    return common.result(
        Regime.DA_MPM,
        Behavior.NASH,
        common.stage(cfg, price_da, g_da, bids.load_da),
        common.stage(cfg, price_rt, g_rt, bids.load_rt),
        bids,
        symmetric=cfg.is_homogeneous
    )
