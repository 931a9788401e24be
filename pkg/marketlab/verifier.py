"""Numerical checks that a claimed equilibrium is a fixed point.

Two independent checks are run for every participant:

* the stationarity conditions of its individual problem, evaluated at the
  claimed equilibrium (:py:func:`foc_residuals`);
* a derivative-free search over its own decision, holding every other
  participant's decision fixed (:py:func:`best_response_generator` and
  :py:func:`best_response_load`).

Price-taking (competitive) participants are checked against the claimed
prices; price-anticipating (Nash) participants are checked by re-clearing the
market for every candidate decision. A day-ahead deviation is evaluated after
the real-time followers re-equilibrate, as described by
:py:meth:`marketlab.mechanism.Mechanism.respond`.
"""

import concurrent.futures
import logging
import math
import types
import typing

import numpy as np
from scipy import optimize

from marketlab import utils
from marketlab.errors import MarketError, UnsupportedRegimePair
from marketlab.market import (Behavior, BidKind, BidProfile,
                              EquilibriumResult, FloatMap, MarketConfig,
                              Regime, Stage, TwoStageOutcome)
from marketlab.mechanism import Mechanism, create_mechanism
from marketlab.settlement import settle

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-5

Objective = typing.Callable[[float], float]


class SearchOptions(typing.NamedTuple):
    """Tunables of the best-response search."""

    grid_radius: typing.Optional[float] = None
    """Half-width of the coarse grid around the incumbent decision; by
    default ``max(1, |decision|)``.
    """
    grid_points: int = 41
    """Grid points per searched dimension."""
    refine_iters: int = 30
    """Iteration cap of the local refinement around the best grid point."""
    bracket_tolerance: float = 1e-10
    """Refinement stops once the bracket is narrower than this fraction of
    the grid radius.
    """


class Verdict(typing.NamedTuple):
    """Outcome of a verification: either verified, or the participant with
    the largest relative profitable deviation.
    """

    verified: bool
    participant: typing.Optional[str] = None
    gain: float = 0.0

    def __str__(self) -> str:
        if self.verified:
            return 'Verified'
        return f'Violated({self.participant}, {self.gain:.12g})'


class VerificationReport(typing.NamedTuple):
    """Everything :py:func:`verify_equilibrium` measured."""

    balance_residuals: typing.Mapping[Stage, float]
    foc_residuals: FloatMap
    best_deviation_gain: FloatMap
    """Best profit increase (generators) or payment decrease (loads)
    found.
    """
    baseline_objectives: FloatMap
    """Profit (generators) or payment (loads) at the claimed equilibrium."""
    tolerance: float
    verdict: Verdict


def _checked_mechanism(
    eq: EquilibriumResult,
    regime: typing.Optional[Regime]
) -> typing.Type[Mechanism]:
    mechanism = create_mechanism(eq.regime if regime is None else regime)
    if mechanism.BID_KIND != eq.outcome.bids.bid_kind:
        raise UnsupportedRegimePair(
            f'{eq.outcome.bids.bid_kind.value} bids cannot be evaluated '
            f'under the {mechanism.REGIME.value} regime'
        )
    return mechanism


def _profit(
    cost_coeff: float,
    prices: typing.Tuple[float, float],
    g_da: float,
    g_rt: float
) -> float:
    return prices[0] * g_da + prices[1] * g_rt \
        - cost_coeff / 2 * (g_da + g_rt) ** 2


def _outcome_profit(
    cfg: MarketConfig,
    outcome: TwoStageOutcome,
    gen_id: str
) -> float:
    return _profit(
        cfg.generator_cost(gen_id),
        (outcome.day_ahead.price, outcome.real_time.price),
        outcome.day_ahead.gen_dispatch[gen_id],
        outcome.real_time.gen_dispatch[gen_id]
    )


def _outcome_payment(outcome: TwoStageOutcome, load_id: str) -> float:
    return outcome.day_ahead.price * outcome.bids.load_da[load_id] \
        + outcome.real_time.price * outcome.bids.load_rt[load_id]


def _claimed_prices(eq: EquilibriumResult) -> typing.Tuple[float, float]:
    return eq.outcome.day_ahead.price, eq.outcome.real_time.price


def _price_taking_dispatch(
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    gen_id: str,
    prices: typing.Tuple[float, float]
) -> typing.Tuple[float, float]:
    """Returns the dispatch a generator's bids imply at fixed prices, with
    default bids standing in for its bids in a mitigated stage.
    """
    cost_coeff = cfg.generator_cost(gen_id)

    def own(stage: Stage, price: float) -> float:
        bid = bids.generator_bids(stage)[gen_id]
        if mechanism.BID_KIND == BidKind.SLOPE:
            return bid * price
        slope = cfg.slope_da if stage == Stage.DAY_AHEAD else cfg.slope_rt
        return slope * price - bid

    if Stage.DAY_AHEAD in mechanism.GENERATOR_STAGES:
        g_da = own(Stage.DAY_AHEAD, prices[0])
    else:
        g_da = prices[0] / cost_coeff
    if Stage.REAL_TIME in mechanism.GENERATOR_STAGES:
        g_rt = own(Stage.REAL_TIME, prices[1])
    else:
        g_rt = prices[1] / cost_coeff - g_da
    return g_da, g_rt


def _guarded(objective: Objective) -> Objective:
    def evaluate(x: float) -> float:
        try:
            value = objective(x)
        except MarketError:
            return -math.inf
        return value if math.isfinite(value) else -math.inf
    return evaluate


def _search_1d(
    objective: Objective,
    incumbent: float,
    search: SearchOptions,
    lower: typing.Optional[float] = None
) -> float:
    """Returns the best value of ``objective`` found around ``incumbent``
    minus its value at ``incumbent``.
    """
    baseline = objective(incumbent)
    guarded = _guarded(objective)
    radius = search.grid_radius or utils.relative_scale(incumbent)
    grid = np.linspace(incumbent - radius, incumbent + radius,
                       search.grid_points)
    if lower is not None:
        grid = np.unique(np.maximum(grid, lower))
    values = np.array([guarded(x) for x in grid])
    best_value = float(np.max(values))

    step = 2 * radius / max(search.grid_points - 1, 1)
    high = grid[int(np.argmax(values))] + step
    low = high - 2 * step if lower is None else max(high - 2 * step, lower)
    if high > low and math.isfinite(best_value):
        def penalized(x: float) -> float:
            value = guarded(x)
            return -value if math.isfinite(value) else 1e300

        refined = optimize.minimize_scalar(
            penalized,
            bounds=(low, high),
            method='bounded',
            options={
                'xatol': search.bracket_tolerance * radius,
                'maxiter': search.refine_iters
            }
        )
        best_value = max(best_value, float(-refined.fun))
    return max(best_value, baseline) - baseline


def _search_2d(
    objective: typing.Callable[[float, float], float],
    incumbent: typing.Tuple[float, float],
    search: SearchOptions
) -> float:
    """Two-dimensional counterpart of :py:func:`_search_1d` over nonnegative
    decisions.
    """
    baseline = objective(*incumbent)

    def guarded(x: float, y: float) -> float:
        try:
            value = objective(x, y)
        except MarketError:
            return -math.inf
        return value if math.isfinite(value) else -math.inf

    axes = []
    for x in incumbent:
        radius = search.grid_radius or utils.relative_scale(x)
        axes.append(np.unique(np.maximum(
            np.linspace(x - radius, x + radius, search.grid_points), 0.0
        )))
    best_value = -math.inf
    best_point = incumbent
    for x in axes[0]:
        for y in axes[1]:
            value = guarded(float(x), float(y))
            if value > best_value:
                best_value, best_point = value, (float(x), float(y))

    def penalized(p: np.ndarray) -> float:
        value = guarded(float(p[0]), float(p[1]))
        return -value if math.isfinite(value) else 1e300

    refined = optimize.minimize(
        penalized,
        np.array(best_point),
        method='Nelder-Mead',
        bounds=[(0.0, None), (0.0, None)],
        options={
            'maxiter': 20 * search.refine_iters,
            'xatol': search.bracket_tolerance
            * utils.relative_scale(*incumbent),
            'fatol': 0.0
        }
    )
    best_value = max(best_value, float(-refined.fun))
    return max(best_value, baseline) - baseline


def best_response_generator(  # pylint: disable=too-many-arguments,too-many-positional-arguments,too-many-locals
    eq: EquilibriumResult,
    cfg: MarketConfig,
    gen_id: str,
    regime: typing.Optional[Regime] = None,
    search: SearchOptions = SearchOptions(),
    behavior: typing.Optional[Behavior] = None,
    stage: typing.Optional[Stage] = None
) -> float:
    """Searches for a profitable unilateral deviation of one generator.

    Each bid the generator controls is searched on its own: a real-time bid
    at the fixed day-ahead outcome, a day-ahead bid through
    :py:meth:`marketlab.mechanism.Mechanism.respond`. A price-anticipating
    slope bidder is also searched over both slopes jointly, every other bid
    being held fixed.

    Args:
        eq
            The claimed equilibrium.
        cfg
            Market configuration.
        gen_id
            The deviating generator.
        regime
            Market design to evaluate deviations under; ``eq.regime`` by
            default.
        search
            Search tunables.
        behavior
            ``COMPETITIVE`` holds prices at their claimed values,
            ``NASH`` re-clears the market; ``eq.behavior`` by default.
        stage
            Restricts the search to the generator's bid in this stage.

    Returns:
        The best profit found minus the profit of the incumbent bids; never
        negative.

    Raises:
        UnsupportedRegimePair: The generator has no free bid in ``stage``
            under ``regime``, or the bids do not fit the regime.
    """
    mechanism = _checked_mechanism(eq, regime)
    behavior = eq.behavior if behavior is None else behavior
    bids = eq.outcome.bids
    cost_coeff = cfg.generator_cost(gen_id)
    slope_kind = mechanism.BID_KIND == BidKind.SLOPE
    lower = 0.0 if slope_kind else None

    stages = mechanism.GENERATOR_STAGES
    if stage is not None:
        if stage not in stages:
            raise UnsupportedRegimePair(
                f'Generators have no free {stage.value} bid to deviate in '
                f'under the {mechanism.REGIME.value} regime'
            )
        stages = (stage,)

    if behavior == Behavior.COMPETITIVE:
        prices = _claimed_prices(eq)

        def price_taking(deviated: BidProfile) -> float:
            return _profit(cost_coeff, prices, *_price_taking_dispatch(
                cfg, mechanism, deviated, gen_id, prices
            ))

        if slope_kind and stage is None:
            def joint(x: float, y: float) -> float:
                return price_taking(
                    bids.with_generator_bid(Stage.DAY_AHEAD, gen_id, x)
                    .with_generator_bid(Stage.REAL_TIME, gen_id, y)
                )
            return _search_2d(joint, (
                bids.generator_bids(Stage.DAY_AHEAD)[gen_id],
                bids.generator_bids(Stage.REAL_TIME)[gen_id]
            ), search)

        gains = []
        for s in stages:
            def single(x: float, s: Stage = s) -> float:
                return price_taking(bids.with_generator_bid(s, gen_id, x))
            gains.append(_search_1d(
                single, bids.generator_bids(s)[gen_id], search, lower
            ))
        return max(gains, default=0.0)

    day_ahead = mechanism.clear_day_ahead(cfg, bids)
    gains = []
    if slope_kind and stage is None:
        def simultaneous(x: float, y: float) -> float:
            return _outcome_profit(cfg, mechanism.clear(
                cfg,
                bids.with_generator_bid(Stage.DAY_AHEAD, gen_id, x)
                .with_generator_bid(Stage.REAL_TIME, gen_id, y)
            ), gen_id)
        gains.append(_search_2d(simultaneous, (
            bids.generator_bids(Stage.DAY_AHEAD)[gen_id],
            bids.generator_bids(Stage.REAL_TIME)[gen_id]
        ), search))

    def real_time_move(x: float) -> float:
        deviated = bids.with_generator_bid(Stage.REAL_TIME, gen_id, x)
        return _outcome_profit(cfg, TwoStageOutcome(
            day_ahead=day_ahead,
            real_time=mechanism.clear_real_time(cfg, deviated, day_ahead),
            bids=deviated
        ), gen_id)

    def day_ahead_move(x: float) -> float:
        deviated = bids.with_generator_bid(Stage.DAY_AHEAD, gen_id, x)
        return _outcome_profit(cfg, mechanism.respond(cfg, deviated), gen_id)

    moves = {Stage.DAY_AHEAD: day_ahead_move, Stage.REAL_TIME: real_time_move}
    for s in stages:
        gains.append(_search_1d(
            moves[s], bids.generator_bids(s)[gen_id], search, lower
        ))
    return max(gains, default=0.0)



def best_response_load(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    eq: EquilibriumResult,
    cfg: MarketConfig,
    load_id: str,
    regime: typing.Optional[Regime] = None,
    search: SearchOptions = SearchOptions(),
    behavior: typing.Optional[Behavior] = None
) -> float:
    """Searches for a payment-reducing deviation of one load's day-ahead
    quantity, the rest of its demand being bought in real time.

    A price-anticipating load leads: each candidate quantity re-clears the
    day-ahead stage and lets generators re-equilibrate in real time.

    Returns:
        The incumbent payment minus the lowest payment found; never
        negative.

    Raises:
        UnsupportedRegimePair: The bids do not fit the regime.
    """
    mechanism = _checked_mechanism(eq, regime)
    behavior = eq.behavior if behavior is None else behavior
    bids = eq.outcome.bids
    demand = cfg.load_demand(load_id)

    if behavior == Behavior.COMPETITIVE:
        price_da, price_rt = _claimed_prices(eq)

        def objective(x: float) -> float:
            return -(price_da * x + price_rt * (demand - x))
    else:
        def objective(x: float) -> float:
            deviated = bids.with_load_day_ahead(load_id, x, demand)
            return -_outcome_payment(
                mechanism.respond(cfg, deviated), load_id
            )

    return _search_1d(objective, bids.load_da[load_id], search)


def _largest(values: typing.Iterable[float]) -> float:
    return max(values, key=abs, default=0.0)


def _competitive_residuals(
    eq: EquilibriumResult,
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism]
) -> typing.Dict[str, float]:
    prices = _claimed_prices(eq)
    bids = eq.outcome.bids
    residuals = {}
    for generator in cfg.generators:
        g_da, g_rt = _price_taking_dispatch(
            cfg, mechanism, bids, generator.id, prices
        )
        marginal = generator.cost_coeff * (g_da + g_rt)
        if mechanism.BID_KIND == BidKind.SLOPE:
            terms = [price * (price - marginal) for price in prices]
        elif mechanism.GENERATOR_STAGES == (Stage.DAY_AHEAD,):
            terms = [prices[1] - prices[0]]
        else:
            terms = [
                marginal - prices[0 if s == Stage.DAY_AHEAD else 1]
                for s in mechanism.GENERATOR_STAGES
            ]
        residuals[generator.id] = _largest(terms)
    for load in cfg.loads:
        residuals[load.id] = prices[0] - prices[1]
    return residuals


def _augmented_terms(cfg: MarketConfig) -> typing.Tuple[np.ndarray, float]:
    augmented = 1 / (cfg.slope_rt * (cfg.num_generators - 1)) + cfg.costs
    return augmented, float(np.sum(1 / augmented))


def _real_time_kkt(
    cfg: MarketConfig,
    outcome: TwoStageOutcome,
    gen_id: str
) -> float:
    g_rt = outcome.real_time.gen_dispatch[gen_id]
    total = outcome.day_ahead.gen_dispatch[gen_id] + g_rt
    return g_rt / (cfg.slope_rt * (cfg.num_generators - 1)) \
        - outcome.real_time.price + cfg.generator_cost(gen_id) * total


def _slope_residuals(
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    outcome: TwoStageOutcome
) -> typing.Dict[str, float]:
    residuals = {}
    totals = {s: math.fsum(bids.generator_bids(s).values()) for s in Stage}
    for generator in cfg.generators:
        g = outcome.day_ahead.gen_dispatch[generator.id] \
            + outcome.real_time.gen_dispatch[generator.id]
        terms = []
        for s in Stage:
            if totals[s] <= 0:
                continue
            # Others' slopes in both stages held fixed.
            price = outcome.stage(s).price
            terms.append(price / totals[s] * (
                -outcome.stage(s).gen_dispatch[generator.id]
                + (price - generator.cost_coeff * g)
                * (totals[s] - bids.generator_bids(s)[generator.id])
            ))
        residuals[generator.id] = _largest(terms)
    total_da = totals[Stage.DAY_AHEAD]
    for load in cfg.loads:
        x = bids.load_da[load.id]
        da_impact = x / total_da if total_da > 0 else 0.0
        residuals[load.id] = outcome.day_ahead.price + da_impact \
            - outcome.real_time.price \
            + (load.demand - x) * _slope_rt_sensitivity(
                cfg, mechanism, bids, load.id
            )
    return residuals


def _standard_residuals(  # pylint: disable=too-many-locals
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    outcome: TwoStageOutcome
) -> typing.Dict[str, float]:
    del mechanism
    residuals = {}
    price_da = outcome.day_ahead.price
    price_rt = outcome.real_time.price
    num_gens = cfg.num_generators
    own_share = 1 / num_gens - 1
    augmented, augmented_sum = _augmented_terms(cfg)
    mean_pass = float(np.sum(cfg.costs / augmented)) / num_gens
    for j, generator in enumerate(cfg.generators):
        g_da = outcome.day_ahead.gen_dispatch[generator.id]
        g_rt = outcome.real_time.gen_dispatch[generator.id]
        c = generator.cost_coeff
        price_impact = (mean_pass - c / augmented[j]) / augmented_sum
        rt_impact = (price_impact - c * own_share) / augmented[j]
        da_foc = g_da / (cfg.slope_da * num_gens) \
            + price_da * own_share + price_impact * g_rt \
            + price_rt * rt_impact \
            - c * (g_da + g_rt) * (own_share + rt_impact)
        residuals[generator.id] = _largest(
            (da_foc, _real_time_kkt(cfg, outcome, generator.id))
        )
    load_rt_impact = (-1 + mean_pass) / augmented_sum
    for load in cfg.loads:
        x = bids.load_da[load.id]
        residuals[load.id] = price_da + x / (cfg.slope_da * num_gens) \
            - price_rt + (load.demand - x) * load_rt_impact
    return residuals


def _rt_mpm_residuals(
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    outcome: TwoStageOutcome
) -> typing.Dict[str, float]:
    del mechanism
    residuals = {}
    spread = outcome.day_ahead.price - outcome.real_time.price
    num_gens = cfg.num_generators
    for generator in cfg.generators:
        g_da = outcome.day_ahead.gen_dispatch[generator.id]
        residuals[generator.id] = g_da / (cfg.slope_da * num_gens) \
            + spread * (1 / num_gens - 1)
    for load in cfg.loads:
        x = bids.load_da[load.id]
        residuals[load.id] = spread + x / (cfg.slope_da * num_gens)
    return residuals


def _da_mpm_residuals(
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    outcome: TwoStageOutcome
) -> typing.Dict[str, float]:
    del mechanism
    residuals = {}
    inverse_costs = cfg.inverse_cost_sum
    _, augmented_sum = _augmented_terms(cfg)
    for generator in cfg.generators:
        residuals[generator.id] = _real_time_kkt(cfg, outcome, generator.id)
    for load in cfg.loads:
        x = bids.load_da[load.id]
        residuals[load.id] = outcome.day_ahead.price + x / inverse_costs \
            - outcome.real_time.price \
            + (load.demand - x) * (1 / inverse_costs - 1 / augmented_sum)
    return residuals


_NASH_RESIDUALS: typing.Mapping[Regime, typing.Callable[
    [MarketConfig, typing.Type[Mechanism], BidProfile, TwoStageOutcome],
    typing.Dict[str, float]
]] = {
    Regime.STANDARD: _standard_residuals,
    Regime.RT_MPM: _rt_mpm_residuals,
    Regime.DA_MPM: _da_mpm_residuals,
    Regime.SLOPE_STANDARD: _slope_residuals
}


def _nash_residuals(
    eq: EquilibriumResult,
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism]
) -> typing.Dict[str, float]:
    bids = eq.outcome.bids
    return _NASH_RESIDUALS[mechanism.REGIME](
        cfg, mechanism, bids, mechanism.clear(cfg, bids)
    )



def _slope_rt_sensitivity(
    cfg: MarketConfig,
    mechanism: typing.Type[Mechanism],
    bids: BidProfile,
    load_id: str
) -> float:
    """Central difference of the real-time subgame price in one load's
    day-ahead quantity.
    """
    demand = cfg.load_demand(load_id)
    x = bids.load_da[load_id]
    step = 1e-6 * utils.relative_scale(cfg.aggregate_demand)
    try:
        up = mechanism.respond(
            cfg, bids.with_load_day_ahead(load_id, x + step, demand)
        ).real_time.price
        down = mechanism.respond(
            cfg, bids.with_load_day_ahead(load_id, x - step, demand)
        ).real_time.price
    except MarketError as e:
        logger.debug('No real-time sensitivity for %s: %s', load_id, e)
        return 0.0
    return (up - down) / (2 * step)


def foc_residuals(
    eq: EquilibriumResult,
    cfg: MarketConfig,
    regime: typing.Optional[Regime] = None,
    behavior: typing.Optional[Behavior] = None
) -> FloatMap:
    """Evaluates each participant's stationarity condition at the claimed
    equilibrium.

    Competitive participants are checked against the claimed prices. Nash
    participants are checked at the outcome obtained by re-clearing the
    submitted bids, so that a perturbed bid shows up in the residual. A
    generator with bids in both stages reports the larger residual.

    Returns:
        The signed left-hand side of each participant's condition, keyed by
        participant identifier.

    Raises:
        UnsupportedRegimePair: The bids do not fit the regime.
    """
    mechanism = _checked_mechanism(eq, regime)
    behavior = eq.behavior if behavior is None else behavior
    if behavior == Behavior.COMPETITIVE:
        residuals = _competitive_residuals(eq, cfg, mechanism)
    else:
        residuals = _nash_residuals(eq, cfg, mechanism)
    return types.MappingProxyType(residuals)


def verify_equilibrium(  # pylint: disable=too-many-arguments,too-many-positional-arguments,too-many-locals
    eq: EquilibriumResult,
    cfg: MarketConfig,
    tolerance: float = DEFAULT_TOLERANCE,
    search: SearchOptions = SearchOptions(),
    max_workers: typing.Optional[int] = None,
    behavior: typing.Optional[Behavior] = None
) -> VerificationReport:
    """Runs every check on a claimed equilibrium.

    The equilibrium is verified when no participant's best deviation gain
    exceeds ``tolerance * max(1, |baseline objective|)``. Otherwise the
    verdict names the participant whose gain exceeds its threshold by the
    largest factor.

    Args:
        eq
            The claimed equilibrium.
        cfg
            Market configuration the equilibrium is claimed for.
        tolerance
            Relative tolerance on deviation gains.
        search
            Best-response search tunables.
        max_workers
            Worker threads for the per-participant searches.
        behavior
            Overrides ``eq.behavior``.
    """
    behavior = eq.behavior if behavior is None else behavior
    report = settle(eq.outcome, cfg)
    baseline = dict(report.profits)
    baseline.update(report.payments)

    tasks: typing.List[typing.Tuple[str, typing.Callable[[], float]]] = []
    for gen_id in cfg.generator_ids:
        tasks.append((gen_id, lambda gen_id=gen_id: best_response_generator(  # type: ignore[misc]
            eq, cfg, gen_id, search=search, behavior=behavior
        )))
    for load_id in cfg.load_ids:
        tasks.append((load_id, lambda load_id=load_id: best_response_load(  # type: ignore[misc]
            eq, cfg, load_id, search=search, behavior=behavior
        )))
    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        gains = dict(zip(
            (participant for participant, _ in tasks),
            executor.map(lambda task: task[1](), tasks)
        ))

    verdict = Verdict(verified=True)
    worst = 1.0
    for participant, gain in gains.items():
        logger.debug('Best deviation gain of %s: %s', participant, gain)
        excess = gain / (tolerance * utils.relative_scale(
            baseline[participant]
        ))
        if excess > worst:
            worst = excess
            verdict = Verdict(verified=False, participant=participant,
                              gain=gain)
    if not verdict.verified:
        logger.warning('%s deviates profitably, gain %s',
                       verdict.participant, verdict.gain)

    return VerificationReport(
        balance_residuals=types.MappingProxyType({
            Stage.DAY_AHEAD: eq.outcome.day_ahead.balance_residual(),
            Stage.REAL_TIME: eq.outcome.real_time.balance_residual(),
        }),
        foc_residuals=foc_residuals(eq, cfg, behavior=behavior),
        best_deviation_gain=types.MappingProxyType(gains),
        baseline_objectives=types.MappingProxyType(baseline),
        tolerance=tolerance,
        verdict=verdict
    )
