"""Profits, payments and social cost of an outcome, and the metrics that
normalize a Nash outcome by its competitive counterpart.
"""

import math
import typing

from marketlab import utils
from marketlab.equilibria.standard import load_split_standard
from marketlab.errors import MetricDivisionByZero, TooFewGenerators
from marketlab.market import (EquilibriumResult, FloatMap, MarketConfig,
                              TwoStageOutcome, frozen_map)


class SettlementReport(typing.NamedTuple):
    """Money flows of a two-stage outcome."""

    profits: FloatMap
    payments: FloatMap
    social_cost: float
    aggregate_profit: float
    aggregate_payment: float


class NormalizedMetrics(typing.NamedTuple):
    """Nash aggregates divided by competitive aggregates."""

    cost_ratio: float
    profit_ratio: float
    payment_ratio: float


class OutcomeClass(typing.NamedTuple):
    """Qualitative reading of a Nash outcome against the competitive one."""

    winner: str
    """``'generators'`` when aggregate profit exceeds the competitive
    profit, ``'loads'`` when aggregate payment falls short of the
    competitive payment, ``'neither'`` otherwise.
    """
    price_relation: str
    """``'equal'``, ``'real_time_higher'`` or ``'day_ahead_higher'``."""
    cost_efficient: bool
    """Whether social cost equals the competitive social cost."""


def settle(outcome: TwoStageOutcome, cfg: MarketConfig) -> SettlementReport:
    """Settles both stages at their uniform prices.

    A generator earns ``price_d * g_d + price_r * g_r - (c / 2) * (g_d +
    g_r) ** 2``; a load pays ``price_d * d_d + price_r * d_r``.
    """
    price_da = outcome.day_ahead.price
    price_rt = outcome.real_time.price
    profits = []
    costs = []
    for generator in cfg.generators:
        g_da = outcome.day_ahead.gen_dispatch[generator.id]
        g_rt = outcome.real_time.gen_dispatch[generator.id]
        cost = generator.cost_coeff / 2 * (g_da + g_rt) ** 2
        costs.append(cost)
        profits.append(price_da * g_da + price_rt * g_rt - cost)
    payments = [
        price_da * outcome.bids.load_da[l.id]
        + price_rt * outcome.bids.load_rt[l.id]
        for l in cfg.loads
    ]
    return SettlementReport(
        profits=frozen_map(cfg.generator_ids, profits),
        payments=frozen_map(cfg.load_ids, payments),
        social_cost=math.fsum(costs),
        aggregate_profit=math.fsum(profits),
        aggregate_payment=math.fsum(payments)
    )


def normalized_metrics(
    ne: SettlementReport,
    ce: SettlementReport
) -> NormalizedMetrics:
    """Divides each Nash aggregate by the competitive one.

    Raises:
        MetricDivisionByZero: A competitive aggregate is zero.
    """
    for name, value in (('social cost', ce.social_cost),
                        ('aggregate profit', ce.aggregate_profit),
                        ('aggregate payment', ce.aggregate_payment)):
        if value == 0:
            raise MetricDivisionByZero(f'Competitive {name} is zero')
    return NormalizedMetrics(
        cost_ratio=ne.social_cost / ce.social_cost,
        profit_ratio=ne.aggregate_profit / ce.aggregate_profit,
        payment_ratio=ne.aggregate_payment / ce.aggregate_payment
    )


def _augmented_inverse_costs(cfg: MarketConfig) -> typing.List[float]:
    if cfg.num_generators < 2:
        raise TooFewGenerators('At least two generators required')
    return [
        1 / (1 / (cfg.slope_rt * (cfg.num_generators - 1)) + g.cost_coeff)
        for g in cfg.generators
    ]


def heterogeneity_delta(cfg: MarketConfig) -> float:
    """Returns ``sum(c_j / C_j ** 2) - sum(1 / C_j) ** 2 / sum(1 / c_j)``
    with ``C_j = 1 / (b_r (n - 1)) + c_j``; zero for identical costs.

    Raises:
        TooFewGenerators: The market has fewer than two generators.
    """
    inverse = _augmented_inverse_costs(cfg)
    weighted = math.fsum(
        g.cost_coeff * x * x for g, x in zip(cfg.generators, inverse)
    )
    return weighted - math.fsum(inverse) ** 2 / cfg.inverse_cost_sum


def closed_form_metrics_da_mpm(cfg: MarketConfig) -> NormalizedMetrics:
    """Normalized metrics of the day-ahead-mitigated market in closed form,
    valid for heterogeneous costs.
    """
    ratio = math.fsum(_augmented_inverse_costs(cfg)) / cfg.inverse_cost_sum
    loads = cfg.num_loads
    spread = heterogeneity_delta(cfg) \
        / (cfg.inverse_cost_sum * (loads + 1) ** 2)
    share = loads / (loads + 1) ** 2
    return NormalizedMetrics(
        cost_ratio=1 + spread,
        profit_ratio=1 - 2 * ratio * share - spread,
        payment_ratio=1 - ratio * share
    )


def closed_form_metrics_standard(cfg: MarketConfig) -> NormalizedMetrics:
    """Normalized metrics of the standard market with identical generators in
    closed form.

    Raises:
        MetricDivisionByZero: Total demand is zero.
        HeterogeneousUnsupported: Generators' costs differ.
        TooFewGenerators: The market has a single generator.
    """
    demand = cfg.aggregate_demand
    if demand == 0:
        raise MetricDivisionByZero('Aggregate demand is zero')
    d_da, d_rt = load_split_standard(cfg)
    x, y = d_da / demand, d_rt / demand
    c = cfg.homogeneous_cost()
    n = cfg.num_generators - 1
    excess = (
        x * y / (cfg.slope_rt * c * n + 1)
        + x * x / (cfg.slope_da * c * n)
        + y * y / (cfg.slope_rt * c * n)
    )
    return NormalizedMetrics(
        cost_ratio=1.0,
        profit_ratio=1 + 2 * excess,
        payment_ratio=1 + excess
    )


def da_mpm_profit_ratio_homogeneous(
    num_generators: int,
    num_loads: int,
    slope_cost_product: float
) -> float:
    """Profit ratio of the day-ahead-mitigated market with identical
    generators, as a function of participant counts and ``b_r * c``.
    """
    k = slope_cost_product * (num_generators - 1)
    return 1 - k / (1 + k) * 2 * num_loads / (num_loads + 1) ** 2


def classify_outcome(
    ne: SettlementReport,
    ce: SettlementReport,
    eq: EquilibriumResult,
    tolerance: float = utils.RELATIVE_TOLERANCE
) -> OutcomeClass:
    """Reads off who wins the competition, how stage prices compare and
    whether dispatch stays cost-efficient.
    """
    scale = utils.relative_scale(ce.aggregate_profit)
    if ne.aggregate_profit - ce.aggregate_profit > tolerance * scale:
        winner = 'generators'
    elif ce.aggregate_payment - ne.aggregate_payment \
            > tolerance * utils.relative_scale(ce.aggregate_payment):
        winner = 'loads'
    else:
        winner = 'neither'

    price_da = eq.outcome.day_ahead.price
    price_rt = eq.outcome.real_time.price
    if utils.is_close(price_da, price_rt, tolerance):
        price_relation = 'equal'
    elif price_rt > price_da:
        price_relation = 'real_time_higher'
    else:
        price_relation = 'day_ahead_higher'

    return OutcomeClass(
        winner=winner,
        price_relation=price_relation,
        cost_efficient=utils.is_close(
            ne.social_cost, ce.social_cost, tolerance
        )
    )
