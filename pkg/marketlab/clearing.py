"""Market clearing and planner problems.

All clearing rules here are closed forms of equality-constrained quadratic
programs; the only iterative routine is :py:func:`slope_subgame`, which finds
the real-time equilibrium of slope bidders by a one-dimensional root search.
"""

import collections.abc
import logging
import math
import types
import typing

import numpy as np
from scipy import optimize

from marketlab import utils
from marketlab.errors import DegeneratePrice, TooFewGenerators
from marketlab.market import FloatMap, MarketConfig, StageOutcome, frozen_map

logger = logging.getLogger(__name__)

AGGREGATE_LOAD = '*'
"""Allocation key used when a stage is cleared against a bare demand figure
instead of per-load allocations.
"""

StageDemand = typing.Union[float, FloatMap]


def _allocations(stage_demand: StageDemand) -> typing.Tuple[float, FloatMap]:
    if isinstance(stage_demand, collections.abc.Mapping):
        return math.fsum(stage_demand.values()), \
            types.MappingProxyType(dict(stage_demand))
    return float(stage_demand), \
        types.MappingProxyType({AGGREGATE_LOAD: float(stage_demand)})


def clear_intercept_stage(
    intercepts: FloatMap,
    slope: float,
    stage_demand: StageDemand
) -> StageOutcome:
    """Clears a stage in which every generator bids ``g = slope * price -
    intercept``.

    Args:
        intercepts
            Each generator's intercept.
        slope
            The common bid slope, strictly positive.
        stage_demand
            Either the stage's total demand or each load's allocation.

    Returns:
        The uniform price ``(demand + sum(intercepts)) / (slope * n)`` and
        the dispatch each bid implies at that price.
    """
    demand, load_alloc = _allocations(stage_demand)
    ids = list(intercepts)
    betas = utils.as_array(ids, intercepts)
    price = (demand + math.fsum(betas)) / (slope * len(ids))
    return StageOutcome(
        price=price,
        gen_dispatch=frozen_map(ids, slope * price - betas),
        load_alloc=load_alloc
    )


def clear_slope_stage(
    slopes: FloatMap,
    stage_demand: StageDemand
) -> StageOutcome:
    """Clears a stage in which every generator bids ``g = slope_j * price``.

    Returns:
        The price ``demand / sum(slopes)``. When no slope is positive and
        demand is zero, the price is reported as zero and the outcome is
        flagged degenerate.

    Raises:
        DegeneratePrice: No slope is positive but demand is not zero.
    """
    demand, load_alloc = _allocations(stage_demand)
    ids = list(slopes)
    values = utils.as_array(ids, slopes)
    total = math.fsum(values)
    if total <= 0:
        if demand != 0:
            raise DegeneratePrice(
                f'No supply to meet stage demand {demand}'
            )
        return StageOutcome(
            price=0.0,
            gen_dispatch=frozen_map(ids, np.zeros(len(ids))),
            load_alloc=load_alloc,
            degenerate=True
        )
    price = demand / total
    return StageOutcome(
        price=price,
        gen_dispatch=frozen_map(ids, values * price),
        load_alloc=load_alloc
    )


def clear_default_stage(
    cfg: MarketConfig,
    stage_demand: StageDemand,
    prior_dispatch: typing.Optional[FloatMap] = None
) -> StageOutcome:
    """Clears a stage whose generator bids have been replaced by default
    cost-based bids ``g = price / c_j - prior_j``, where ``prior_j`` is the
    generator's dispatch in an earlier stage.
    """
    demand, load_alloc = _allocations(stage_demand)
    ids = cfg.generator_ids
    prior = (
        np.zeros(len(ids)) if prior_dispatch is None
        else utils.as_array(ids, prior_dispatch)
    )
    price = (demand + math.fsum(prior)) / cfg.inverse_cost_sum
    return StageOutcome(
        price=price,
        gen_dispatch=frozen_map(ids, price / cfg.costs - prior),
        load_alloc=load_alloc
    )


def social_planner(cfg: MarketConfig) -> typing.Tuple[FloatMap, float]:
    """Solves the cost-minimizing dispatch of total demand.

    Returns:
        Each generator's dispatch ``d / (c_j * sum(1 / c))`` and the
        system marginal price ``d / sum(1 / c)``.
    """
    price = cfg.aggregate_demand / cfg.inverse_cost_sum
    return frozen_map(cfg.generator_ids, price / cfg.costs), price


def _augmented_costs(cfg: MarketConfig) -> np.ndarray:
    return 1 / (cfg.slope_rt * (cfg.num_generators - 1)) + cfg.costs


def augmented_planner(
    cfg: MarketConfig,
    g_da: FloatMap,
    rt_demand: StageDemand
) -> StageOutcome:
    """Solves the real-time subgame among intercept-bidding generators via its
    equivalent convex dispatch problem.

    Minimizes ``sum(g_r ** 2 / (2 b_r (n - 1)) + c / 2 (g_d + g_r) ** 2)``
    subject to real-time balance; the price is the balance multiplier.

    Args:
        cfg
            Market configuration.
        g_da
            Each generator's day-ahead dispatch.
        rt_demand
            Real-time demand, total or per load.

    Raises:
        TooFewGenerators: The market has fewer than two generators.
    """
    if cfg.num_generators < 2:
        raise TooFewGenerators(
            'The real-time subgame needs at least two generators'
        )
    demand, load_alloc = _allocations(rt_demand)
    ids = cfg.generator_ids
    g_d = utils.as_array(ids, g_da)
    costs = cfg.costs
    augmented = _augmented_costs(cfg)
    price = (demand + math.fsum(costs * g_d / augmented)) \
        / math.fsum(1 / augmented)
    return StageOutcome(
        price=price,
        gen_dispatch=frozen_map(ids, (price - costs * g_d) / augmented),
        load_alloc=load_alloc
    )


class SlopeSubgameResult(typing.NamedTuple):
    """The real-time equilibrium of slope bidders."""

    outcome: StageOutcome
    slopes: FloatMap


def _slope_shares(
    scale: float,
    costs: np.ndarray,
    g_d: np.ndarray,
    demand: float
) -> np.ndarray:
    # Smallest root in [0, 1) of each generator's stationarity quadratic in
    # its share of the aggregate slope; zero where the root is negative.
    a = costs * scale
    r = demand - a * g_d
    p = 2 * demand - a * g_d + a * demand
    q = a * demand
    disc = np.sqrt(np.maximum(p * p - 4 * q * r, 0.0))
    return np.divide(
        2 * r,
        p + disc,
        out=np.zeros_like(r),
        where=r > 0
    )


def slope_subgame(
    cfg: MarketConfig,
    g_da: FloatMap,
    rt_demand: StageDemand,
    max_doublings: int = 2000
) -> SlopeSubgameResult:
    """Finds the Nash equilibrium of the real-time slope-bidding game given
    fixed day-ahead dispatch.

    Each generator's real-time slope satisfies
    ``-g_r + (price - c (g_d + g_r)) * (B - slope) = 0`` where ``B`` is the
    sum of slopes. For a given ``B`` each condition is a quadratic in the
    generator's share ``slope / B``; the equilibrium ``B`` makes the shares
    sum to one.

    Raises:
        TooFewGenerators: The market has fewer than three generators.
        DegeneratePrice: Real-time demand is not positive, or no aggregate
            slope balances the shares.
    """
    if cfg.num_generators < 3:
        raise TooFewGenerators(
            'The real-time slope subgame needs at least three generators'
        )
    demand, load_alloc = _allocations(rt_demand)
    if demand <= 0:
        raise DegeneratePrice(
            f'Real-time slope subgame needs positive demand, got {demand}'
        )
    ids = cfg.generator_ids
    costs = cfg.costs
    g_d = utils.as_array(ids, g_da)

    def excess_share(scale: float) -> float:
        return float(np.sum(_slope_shares(scale, costs, g_d, demand))) - 1

    upper = 1.0
    for _ in range(max_doublings):
        if excess_share(upper) <= 0:
            break
        upper *= 2
    else:
        raise DegeneratePrice('No aggregate real-time slope clears the game')
    lower = upper
    for _ in range(max_doublings):
        if excess_share(lower) > 0:
            break
        lower /= 2
    else:
        raise DegeneratePrice('No aggregate real-time slope clears the game')

    scale = optimize.brentq(
        excess_share, lower, upper, xtol=1e-15 * upper, rtol=1e-14, maxiter=500
    )
    logger.debug('Slope subgame aggregate slope %s in [%s, %s]',
                 scale, lower, upper)
    slopes = frozen_map(ids, _slope_shares(scale, costs, g_d, demand) * scale)
    return SlopeSubgameResult(
        outcome=clear_slope_stage(slopes, load_alloc),
        slopes=slopes
    )
