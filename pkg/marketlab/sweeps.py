"""Parameter sweeps over market size and bid slopes.

Every cell of a :py:class:`SweepGrid` is computed independently from a
freshly built configuration; cells are evaluated in a thread pool and
assembled in axis order, so a grid does not depend on evaluation order.
A cell whose solver rejects the configuration is absent and holds ``nan``.
"""

import concurrent.futures
import enum
import itertools
import logging
import math
import typing
import warnings

import numpy as np

from marketlab.equilibria import load_split_standard, solve_equilibrium
from marketlab.errors import (InvalidRange, MarketError, MetricDivisionByZero,
                              SanityBandWarning)
from marketlab.market import (Behavior, GeneratorParams, LoadParams,
                              MarketConfig, Regime, homogeneous_config,
                              validate_config)
from marketlab.settlement import normalized_metrics, settle

logger = logging.getLogger(__name__)

DEFAULT_GENERATOR_RANGE = tuple(range(2, 26))
DEFAULT_LOAD_RANGE = tuple(range(1, 26))

CASE_STUDY_COST = 0.1
CASE_STUDY_DEMANDS = (0.2, 25.6, 106.6, 199.6)
CASE_STUDY_SLOPE = 10.0

SANITY_BAND = (-1.0, 2.0)


class Metric(enum.Enum):
    """The quantity a sweep records in each cell."""

    PROFIT_RATIO = 'profit_ratio'
    PAYMENT_RATIO = 'payment_ratio'
    COST_RATIO = 'cost_ratio'
    NORMALIZED_DA_ALLOCATION = 'normalized_da_allocation'
    """Aggregate Nash day-ahead load divided by total demand."""


class Axis(typing.NamedTuple):
    """Labelled values along one side of a sweep grid."""

    label: str
    values: typing.Tuple[float, ...]


class SweepGrid(typing.NamedTuple):
    """A matrix of metric values; ``cells[i, j]`` belongs to
    ``x_axis.values[i]`` and ``y_axis.values[j]``.
    """

    x_axis: Axis
    y_axis: Axis
    cells: np.ndarray
    metric: Metric
    label: str = ''

    def iter_cells(
        self
    ) -> typing.Iterator[typing.Tuple[float, float, typing.Optional[float]]]:
        """Yields ``(x, y, value)`` in row-major order, ``value`` being
        ``None`` for absent cells.
        """
        for (i, x), (j, y) in itertools.product(
            enumerate(self.x_axis.values), enumerate(self.y_axis.values)
        ):
            value = float(self.cells[i, j])
            yield x, y, None if math.isnan(value) else value


def case_study_config() -> MarketConfig:
    """Four identical generators serving four loads of very different size,
    with both stage slopes equal to ``1 / c``.
    """
    return homogeneous_config(
        len(CASE_STUDY_DEMANDS),
        CASE_STUDY_COST,
        CASE_STUDY_DEMANDS,
        CASE_STUDY_SLOPE,
        CASE_STUDY_SLOPE
    )


def slope_choices(
    cost_coeff: float,
    epsilon: float = 0.025
) -> typing.Tuple[float, float, float]:
    """Returns the intercept-bid slopes ``1 / (c + epsilon)``, ``1 / c`` and
    ``1 / (c - epsilon)``.

    Raises:
        InvalidRange: ``epsilon`` is negative or not smaller than ``c``.
    """
    if not 0 <= epsilon < cost_coeff:
        raise InvalidRange(
            f'epsilon must lie in [0, {cost_coeff}), got {epsilon}'
        )
    return (
        1 / (cost_coeff + epsilon),
        1 / cost_coeff,
        1 / (cost_coeff - epsilon)
    )


def _check_counts(name: str, values: typing.Sequence[int]) -> None:
    if not values:
        raise InvalidRange(f'{name} is empty')
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) \
                or value < 1:
            raise InvalidRange(f'{name} holds {value!r}, not a positive count')


def _check_slopes(name: str, values: typing.Sequence[float]) -> None:
    if not values:
        raise InvalidRange(f'{name} is empty')
    for value in values:
        if not math.isfinite(value) or value <= 0:
            raise InvalidRange(f'{name} holds {value!r}, not a positive slope')


def resized_config(
    base_cfg: MarketConfig,
    num_generators: int,
    num_loads: int,
    slope: typing.Optional[float] = None
) -> MarketConfig:
    """Returns ``base_cfg`` with ``num_generators`` generators, whose costs
    cycle through the base costs, and ``num_loads`` loads sharing the base
    total demand equally.

    Args:
        base_cfg
            Configuration to resize.
        num_generators
            Generator count.
        num_loads
            Load count.
        slope
            Both stage slopes; ``1 / mean(c)`` by default.
    """
    costs = itertools.islice(
        itertools.cycle(g.cost_coeff for g in base_cfg.generators),
        num_generators
    )
    if slope is None:
        slope = 1 / float(np.mean(base_cfg.costs))
    demand = base_cfg.aggregate_demand / num_loads
    return validate_config(MarketConfig(
        generators=tuple(
            GeneratorParams(id=f'G{j + 1}', cost_coeff=c)
            for j, c in enumerate(costs)
        ),
        loads=tuple(
            LoadParams(id=f'L{l + 1}', demand=demand)
            for l in range(num_loads)
        ),
        slope_da=slope,
        slope_rt=slope
    ))


def _flag_out_of_band(value: float, where: str) -> None:
    if not SANITY_BAND[0] <= value <= SANITY_BAND[1]:
        warnings.warn(
            f'Normalized day-ahead allocation {value} at {where} lies '
            f'outside {list(SANITY_BAND)}',
            SanityBandWarning
        )


def _metric_value(
    cfg: MarketConfig,
    regime: Regime,
    metric: Metric
) -> float:
    nash = solve_equilibrium(cfg, regime, Behavior.NASH)
    if metric == Metric.NORMALIZED_DA_ALLOCATION:
        if cfg.aggregate_demand == 0:
            raise MetricDivisionByZero('Aggregate demand is zero')
        return nash.outcome.bids.aggregate_load_da / cfg.aggregate_demand
    competitive = solve_equilibrium(cfg, regime, Behavior.COMPETITIVE)
    ratios = normalized_metrics(
        settle(nash.outcome, cfg), settle(competitive.outcome, cfg)
    )
    return {
        Metric.PROFIT_RATIO: ratios.profit_ratio,
        Metric.PAYMENT_RATIO: ratios.payment_ratio,
        Metric.COST_RATIO: ratios.cost_ratio,
    }[metric]


def sweep_participants(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    base_cfg: MarketConfig,
    g_range: typing.Sequence[int] = DEFAULT_GENERATOR_RANGE,
    l_range: typing.Sequence[int] = DEFAULT_LOAD_RANGE,
    regime: Regime = Regime.DA_MPM,
    metric: Metric = Metric.PROFIT_RATIO,
    slope: typing.Optional[float] = None,
    max_workers: typing.Optional[int] = None
) -> SweepGrid:
    """Evaluates ``metric`` at the Nash equilibrium of every market size in
    ``g_range`` by ``l_range``, holding total demand fixed.

    Args:
        base_cfg
            Configuration supplying costs and total demand; see
            :py:func:`resized_config`.
        g_range
            Generator counts, the grid's x axis.
        l_range
            Load counts, the grid's y axis.
        regime
            Market design.
        metric
            Recorded quantity.
        slope
            Both stage slopes; ``1 / mean(c)`` by default.
        max_workers
            Worker threads.

    Raises:
        InvalidRange: A range is empty or holds a non-positive count.
    """
    _check_counts('g_range', g_range)
    _check_counts('l_range', l_range)
    logger.info('Sweeping %s %s over %d x %d market sizes', regime.value,
                metric.value, len(g_range), len(l_range))

    def evaluate(size: typing.Tuple[int, int]) -> float:
        num_gens, num_loads = size
        try:
            cfg = resized_config(base_cfg, num_gens, num_loads, slope)
            value = _metric_value(cfg, regime, metric)
        except MarketError as e:
            logger.debug('Cell |G|=%d |L|=%d absent: %s',
                         num_gens, num_loads, e)
            return math.nan
        if metric == Metric.NORMALIZED_DA_ALLOCATION:
            _flag_out_of_band(value, f'|G|={num_gens}, |L|={num_loads}')
        return value

    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        values = list(executor.map(
            evaluate, itertools.product(g_range, l_range)
        ))
    return SweepGrid(
        x_axis=Axis('generators', tuple(g_range)),
        y_axis=Axis('loads', tuple(l_range)),
        cells=np.array(values, dtype=float).reshape(len(g_range),
                                                    len(l_range)),
        metric=metric,
        label=regime.value
    )


def sweep_slopes(
    cfg: MarketConfig,
    bd_range: typing.Sequence[float],
    br_range: typing.Sequence[float],
    max_workers: typing.Optional[int] = None
) -> SweepGrid:
    """Evaluates the standard market's normalized Nash day-ahead allocation
    at every pair of stage slopes.

    Raises:
        InvalidRange: A range is empty or holds a non-positive slope.
        TooFewGenerators: The market has a single generator.
        HeterogeneousUnsupported: Generators' costs differ.
        MetricDivisionByZero: Total demand is zero.
    """
    _check_slopes('bd_range', bd_range)
    _check_slopes('br_range', br_range)
    demand = cfg.aggregate_demand
    if demand == 0:
        raise MetricDivisionByZero('Aggregate demand is zero')
    logger.info('Sweeping day-ahead allocation over %d x %d slopes',
                len(bd_range), len(br_range))

    def evaluate(slopes: typing.Tuple[float, float]) -> float:
        slope_da, slope_rt = slopes
        d_da, _ = load_split_standard(
            cfg._replace(slope_da=float(slope_da), slope_rt=float(slope_rt))
        )
        value = d_da / demand
        _flag_out_of_band(value, f'b_d={slope_da}, b_r={slope_rt}')
        return value

    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        values = list(executor.map(
            evaluate, itertools.product(bd_range, br_range)
        ))
    return SweepGrid(
        x_axis=Axis('slope_da', tuple(float(b) for b in bd_range)),
        y_axis=Axis('slope_rt', tuple(float(b) for b in br_range)),
        cells=np.array(values, dtype=float).reshape(len(bd_range),
                                                    len(br_range)),
        metric=Metric.NORMALIZED_DA_ALLOCATION,
        label=Regime.STANDARD.value
    )


def compare_mechanisms(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    cfg: MarketConfig,
    b_values: typing.Optional[typing.Sequence[float]] = None,
    g_range: typing.Sequence[int] = DEFAULT_GENERATOR_RANGE,
    l_range: typing.Sequence[int] = DEFAULT_LOAD_RANGE,
    metric: Metric = Metric.PROFIT_RATIO,
    max_workers: typing.Optional[int] = None
) -> typing.List[SweepGrid]:
    """Sweeps the standard market once per intercept-bid slope in
    ``b_values``, then the slope-bid market.

    Args:
        cfg
            Configuration supplying costs and total demand.
        b_values
            Intercept-bid slopes; :py:func:`slope_choices` of the mean cost
            by default.
        g_range
            Generator counts.
        l_range
            Load counts.
        metric
            Recorded quantity.
        max_workers
            Worker threads per sweep.

    Raises:
        InvalidRange: A range is empty or holds an invalid value.
    """
    if b_values is None:
        b_values = slope_choices(float(np.mean(cfg.costs)))
    _check_slopes('b_values', b_values)
    grids = []
    for b in b_values:
        grid = sweep_participants(cfg, g_range, l_range, Regime.STANDARD,
                                  metric, slope=b, max_workers=max_workers)
        grids.append(grid._replace(label=f'intercept b={b:.12g}'))
    grids.append(sweep_participants(
        cfg, g_range, l_range, Regime.SLOPE_STANDARD, metric,
        max_workers=max_workers
    )._replace(label='slope'))
    return grids
