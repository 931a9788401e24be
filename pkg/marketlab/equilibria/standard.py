"""Equilibria of the standard market: intercept bids in both stages and no
mitigation.
"""

import typing
import warnings

import numpy as np

from marketlab.equilibria import common
from marketlab.errors import NegativeAllocationWarning
from marketlab.market import (Behavior, EquilibriumResult, FloatMap,
                              MarketConfig, Regime)


def competitive_standard(
    cfg: MarketConfig,
    da_load_split: typing.Optional[FloatMap] = None
) -> EquilibriumResult:
    """The competitive equilibrium.

    Both stages clear at ``d / sum(1 / c)`` and total dispatch is the social
    planner's. Only each generator's sum of intercepts is pinned down; the
    canonical representative schedules each generator's dispatch in both
    stages in proportion to stage demand.

    Args:
        cfg
            Market configuration.
        da_load_split
            Day-ahead quantity of every load; by default loads buy all of
            their demand day-ahead.

    Raises:
        SplitMismatch: ``da_load_split`` does not name exactly the
            configured loads.
    """
    price = common.system_price(cfg)
    load_da = common.resolve_split(cfg, da_load_split, 1.0)
    load_rt = cfg.demands - load_da
    g_da = common.proportional_dispatch(cfg, float(np.sum(load_da)))
    g_rt = common.proportional_dispatch(cfg, float(np.sum(load_rt)))
    bids = common.intercept_bids(
        cfg,
        cfg.slope_da * price - g_da,
        cfg.slope_rt * price - g_rt,
        load_da
    )
    return common.result(
        Regime.STANDARD,
        Behavior.COMPETITIVE,
        common.stage(cfg, price, g_da, bids.load_da),
        common.stage(cfg, price, g_rt, bids.load_rt),
        bids,
        degrees_of_freedom=(
            'Each generator\'s day-ahead and real-time intercepts are '
            'determined only through their sum; the split of load between '
            'stages is free (default: all day-ahead).'
        ),
        symmetric=cfg.is_homogeneous
    )


def _split_terms(
    cfg: MarketConfig
) -> typing.Tuple[float, float, float]:
    c = cfg.homogeneous_cost()
    n = cfg.num_generators - 1
    loads = cfg.num_loads
    da_weight = cfg.slope_rt * c + (loads + 1) / n
    rt_weight = cfg.slope_rt * c + 1 / n
    return c, da_weight, rt_weight


def load_split_standard(cfg: MarketConfig) -> typing.Tuple[float, float]:
    """Aggregate day-ahead and real-time load at the Nash equilibrium.

    Raises:
        TooFewGenerators: The market has a single generator.
        HeterogeneousUnsupported: Generators' costs differ.
    """
    common.require_generators(cfg, 2, 'the standard-market Nash equilibrium')
    _, da_weight, rt_weight = _split_terms(cfg)
    participants = cfg.num_generators + cfg.num_loads - 1
    da_term = cfg.slope_da * da_weight
    rt_term = cfg.slope_rt * rt_weight * participants
    demand = cfg.aggregate_demand
    return (
        da_term / (da_term + rt_term) * demand,
        rt_term / (da_term + rt_term) * demand
    )


def da_dominance_threshold(cfg: MarketConfig) -> float:
    """The day-ahead slope at and above which the Nash equilibrium places at
    least as much load day-ahead as in real time.

    Raises:
        TooFewGenerators: The market has a single generator.
        HeterogeneousUnsupported: Generators' costs differ.
    """
    common.require_generators(cfg, 2, 'the standard-market Nash equilibrium')
    _, da_weight, rt_weight = _split_terms(cfg)
    participants = cfg.num_generators + cfg.num_loads - 1
    return cfg.slope_rt * rt_weight * participants / da_weight


def nash_standard(  # pylint: disable=too-many-locals
    cfg: MarketConfig
) -> EquilibriumResult:
    """The symmetric Nash equilibrium among identical generators and
    price-anticipating loads.

    A load whose day-ahead allocation comes out negative is kept as computed,
    listed in the result's ``negative_allocations`` and reported with a
    :py:class:`~marketlab.errors.NegativeAllocationWarning`.

    Raises:
        TooFewGenerators: The market has a single generator.
        HeterogeneousUnsupported: Generators' costs differ.
    """
    common.require_generators(cfg, 2, 'the standard-market Nash equilibrium')
    c, da_weight, rt_weight = _split_terms(cfg)
    num_gens = cfg.num_generators
    n = num_gens - 1
    loads = cfg.num_loads
    b_d, b_r = cfg.slope_da, cfg.slope_rt
    demand = cfg.aggregate_demand
    d_da, d_rt = load_split_standard(cfg)

    beta_da = b_d * c / num_gens * demand \
        + (b_r * c - (num_gens - 2) / n) / da_weight \
        * (loads + 1) / (num_gens * n) * d_da
    beta_rt = b_r * c / num_gens * demand \
        - (num_gens - 2) / (num_gens * n) * d_rt

    spread = b_d + b_r * n
    load_da = (
        b_d * cfg.demands / spread
        + b_d / (1 + b_r * c * n) / spread * d_rt
        - b_r / spread * d_da
    )

    price_da = (b_r * c * n + 2) / (b_r * c * n + 1) * c / num_gens * demand \
        + ((b_r / b_d - 1) * c + 1 / (b_d * n)) / (b_r * c * n + 1) \
        * d_da / num_gens
    weights = b_d * da_weight + b_r * rt_weight * (num_gens + loads - 1)
    price_rt = price_da \
        + ((num_gens - 2) / n - b_r * c) / (num_gens * n) * demand / weights

    negative = tuple(
        load_id for load_id, quantity in zip(cfg.load_ids, load_da)
        if quantity < 0
    )
    if negative:
        warnings.warn(
            'Negative day-ahead allocation for loads ' + ', '.join(negative),
            NegativeAllocationWarning
        )

    bids = common.intercept_bids(
        cfg,
        np.full(num_gens, beta_da),
        np.full(num_gens, beta_rt),
        load_da
    )
    return common.result(
        Regime.STANDARD,
        Behavior.NASH,
        common.stage(cfg, price_da, np.full(num_gens, d_da / num_gens),
                     bids.load_da),
        common.stage(cfg, price_rt, np.full(num_gens, d_rt / num_gens),
                     bids.load_rt),
        bids,
        negative_allocations=negative
    )
