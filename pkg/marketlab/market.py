"""Domain types of a two-stage settlement market and the operations that build
and validate them.

A market is parameterized by a :py:class:`MarketConfig`: generators with
quadratic costs, loads with inelastic total demand, and the slopes of the
intercept bids admitted in each stage. Participants' decisions are held in a
:py:class:`BidProfile`; clearing a profile yields a :py:class:`StageOutcome`
per stage, paired in a :py:class:`TwoStageOutcome`.

Identifier order is the order given in the configuration; every mapping in
this module iterates in that order.
"""

import enum
import functools
import json
import math
import types
import typing
import warnings

import numpy as np
import pandas as pd

from marketlab import utils
from marketlab.errors import (DuplicateParticipant, EmptyParticipants,
                              HeterogeneousUnsupported, InvalidCost,
                              InvalidSlope, NegativeDemand, ParseError,
                              SplitMismatch)

FloatMap = typing.Mapping[str, float]

DEMAND_CSV_HEADER = ('load_id', 'demand_mw')


class Stage(enum.Enum):
    """A settlement stage."""

    DAY_AHEAD = 'day_ahead'
    REAL_TIME = 'real_time'


class Regime(enum.Enum):
    """A market design: bid kind plus the stage, if any, in which generator
    bids are replaced by default cost-based bids.
    """

    STANDARD = 'standard'
    RT_MPM = 'rt-mpm'
    DA_MPM = 'da-mpm'
    SLOPE_STANDARD = 'slope'


class Behavior(enum.Enum):
    """Whether participants take prices as given or anticipate them."""

    COMPETITIVE = 'competitive'
    NASH = 'nash'


class BidKind(enum.Enum):
    """The family of supply functions generators may submit."""

    INTERCEPT = 'intercept'
    """``g = b * price - intercept`` with an exogenous slope ``b``."""

    SLOPE = 'slope'
    """``g = slope * price`` with a participant-chosen slope."""


def frozen_map(
    ids: typing.Sequence[str],
    values: typing.Iterable[float]
) -> FloatMap:
    """Returns a read-only mapping from each of ``ids`` to the corresponding
    value.
    """
    return types.MappingProxyType(utils.as_map(ids, values))


class GeneratorParams(typing.NamedTuple):
    """A generator with cost ``(cost_coeff / 2) * g ** 2``."""

    id: str
    cost_coeff: float
    """Quadratic cost coefficient in $/MW², strictly positive."""


class LoadParams(typing.NamedTuple):
    """A load with inelastic total demand."""

    id: str
    demand: float
    """Total demand in MW across both stages, nonnegative."""


_AGGREGATE_CACHE_SIZE = 1024


def _read_only(values: typing.Iterable[float]) -> np.ndarray:
    array = np.array(list(values), dtype=float)
    array.setflags(write=False)
    return array


@functools.lru_cache(maxsize=_AGGREGATE_CACHE_SIZE)
def _costs(generators: typing.Tuple[GeneratorParams, ...]) -> np.ndarray:
    return _read_only(g.cost_coeff for g in generators)


@functools.lru_cache(maxsize=_AGGREGATE_CACHE_SIZE)
def _inverse_cost_sum(generators: typing.Tuple[GeneratorParams, ...]) -> float:
    return math.fsum(1 / g.cost_coeff for g in generators)


@functools.lru_cache(maxsize=_AGGREGATE_CACHE_SIZE)
def _demands(loads: typing.Tuple[LoadParams, ...]) -> np.ndarray:
    return _read_only(l.demand for l in loads)


@functools.lru_cache(maxsize=_AGGREGATE_CACHE_SIZE)
def _aggregate_demand(loads: typing.Tuple[LoadParams, ...]) -> float:
    return math.fsum(l.demand for l in loads)


class MarketConfig(typing.NamedTuple):
    """The complete exogenous parameterization of a market."""

    generators: typing.Tuple[GeneratorParams, ...]
    loads: typing.Tuple[LoadParams, ...]
    slope_da: float
    """Slope of day-ahead intercept bids, MW per $/MW."""
    slope_rt: float
    """Slope of real-time intercept bids, MW per $/MW."""

    @property
    def generator_ids(self) -> typing.Tuple[str, ...]:
        """Generator identifiers in configuration order."""
        return tuple(g.id for g in self.generators)

    @property
    def load_ids(self) -> typing.Tuple[str, ...]:
        """Load identifiers in configuration order."""
        return tuple(l.id for l in self.loads)

    @property
    def num_generators(self) -> int:
        """Number of generators."""
        return len(self.generators)

    @property
    def num_loads(self) -> int:
        """Number of loads."""
        return len(self.loads)

    @property
    def costs(self) -> np.ndarray:
        """Cost coefficients in generator order, read-only."""
        return _costs(self.generators)

    @property
    def demands(self) -> np.ndarray:
        """Load demands in load order, read-only."""
        return _demands(self.loads)

    @property
    def aggregate_demand(self) -> float:
        """Total inelastic demand ``d``."""
        return _aggregate_demand(self.loads)

    @property
    def inverse_cost_sum(self) -> float:
        """The sum of reciprocal cost coefficients."""
        return _inverse_cost_sum(self.generators)

    @property
    def is_homogeneous(self) -> bool:
        """Whether all generators share one cost coefficient."""
        costs = self.costs
        return bool(np.allclose(costs, costs[0], rtol=1e-12, atol=0.0))

    def homogeneous_cost(self) -> float:
        """Returns the common cost coefficient.

        Raises:
            HeterogeneousUnsupported: Generators' cost coefficients differ.
        """
        if not self.is_homogeneous:
            raise HeterogeneousUnsupported(
                'Identical generator cost coefficients required'
            )
        return float(self.costs[0])

    def load_demand(self, load_id: str) -> float:
        """Returns a load's total demand; raises KeyError if unknown."""
        for load in self.loads:
            if load.id == load_id:
                return load.demand
        raise KeyError(load_id)

    def generator_cost(self, gen_id: str) -> float:
        """Returns a generator's cost coefficient; raises KeyError if
        unknown.
        """
        for generator in self.generators:
            if generator.id == gen_id:
                return generator.cost_coeff
        raise KeyError(gen_id)


class BidProfile(typing.NamedTuple):
    """Every participant's decisions in both stages.

    For slope bids the intercept maps hold zeros and the slope maps are
    present.
    """

    bid_kind: BidKind
    gen_intercepts_da: FloatMap
    gen_intercepts_rt: FloatMap
    load_da: FloatMap
    load_rt: FloatMap
    gen_slopes_da: typing.Optional[FloatMap] = None
    gen_slopes_rt: typing.Optional[FloatMap] = None

    def generator_bids(self, stage: Stage) -> FloatMap:
        """Returns generators' free bid variables in ``stage``: intercepts
        for intercept bids, slopes for slope bids.
        """
        if self.bid_kind == BidKind.SLOPE:
            slopes = (
                self.gen_slopes_da if stage == Stage.DAY_AHEAD
                else self.gen_slopes_rt
            )
            assert slopes is not None
            return slopes
        return (
            self.gen_intercepts_da if stage == Stage.DAY_AHEAD
            else self.gen_intercepts_rt
        )

    def with_generator_bid(
        self,
        stage: Stage,
        gen_id: str,
        value: float
    ) -> 'BidProfile':
        """Returns a copy of this profile with generator ``gen_id``'s free bid
        variable in ``stage`` replaced by ``value``.
        """
        bids = dict(self.generator_bids(stage))
        bids[gen_id] = float(value)
        field = {
            (BidKind.INTERCEPT, Stage.DAY_AHEAD): 'gen_intercepts_da',
            (BidKind.INTERCEPT, Stage.REAL_TIME): 'gen_intercepts_rt',
            (BidKind.SLOPE, Stage.DAY_AHEAD): 'gen_slopes_da',
            (BidKind.SLOPE, Stage.REAL_TIME): 'gen_slopes_rt',
        }[(self.bid_kind, stage)]
        return self._replace(**{field: types.MappingProxyType(bids)})  # type: ignore[arg-type]  # pylint: disable=no-member

    def with_load_day_ahead(
        self,
        load_id: str,
        quantity: float,
        demand: float
    ) -> 'BidProfile':
        """Returns a copy of this profile in which load ``load_id`` buys
        ``quantity`` day-ahead and the rest of ``demand`` in real time.
        """
        load_da = dict(self.load_da)
        load_rt = dict(self.load_rt)
        load_da[load_id] = float(quantity)
        load_rt[load_id] = float(demand - quantity)
        return self._replace(  # pylint: disable=no-member
            load_da=types.MappingProxyType(load_da),
            load_rt=types.MappingProxyType(load_rt)
        )

    @property
    def aggregate_load_da(self) -> float:
        """Total day-ahead load."""
        return math.fsum(self.load_da.values())

    @property
    def aggregate_load_rt(self) -> float:
        """Total real-time load."""
        return math.fsum(self.load_rt.values())


class StageOutcome(typing.NamedTuple):
    """The clearing price and quantities of one stage."""

    price: float
    gen_dispatch: FloatMap
    load_alloc: FloatMap
    degenerate: bool = False
    """Set when no supply and no demand met in this stage, so that the
    reported price of zero carries no information.
    """

    def balance_residual(self) -> float:
        """Returns total dispatch minus total allocation."""
        return (
            math.fsum(self.gen_dispatch.values())
            - math.fsum(self.load_alloc.values())
        )


class TwoStageOutcome(typing.NamedTuple):
    """Day-ahead and real-time outcomes plus the bids that produced them."""

    day_ahead: StageOutcome
    real_time: StageOutcome
    bids: BidProfile

    def stage(self, stage: Stage) -> StageOutcome:
        """Returns the outcome of one stage."""
        return self.day_ahead if stage == Stage.DAY_AHEAD else self.real_time

    def total_dispatch(self) -> FloatMap:
        """Returns each generator's dispatch summed over both stages."""
        return types.MappingProxyType({
            gen_id: g_da + self.real_time.gen_dispatch[gen_id]
            for gen_id, g_da in self.day_ahead.gen_dispatch.items()
        })


class EquilibriumResult(typing.NamedTuple):
    """An equilibrium outcome together with how it was obtained."""

    regime: Regime
    behavior: Behavior
    outcome: TwoStageOutcome
    degrees_of_freedom: str
    """Description of any non-uniqueness; empty when the equilibrium is
    unique.
    """
    symmetric: bool
    negative_allocations: typing.Tuple[str, ...] = ()
    """Loads whose day-ahead allocation is negative."""


def validate_config(cfg: MarketConfig) -> MarketConfig:
    """Checks that a configuration is well formed.

    Args:
        cfg
            The configuration to check.

    Returns:
        ``cfg``, unchanged, with its aggregates cached.

    Raises:
        EmptyParticipants: There are no generators or no loads.
        InvalidSlope: A stage slope is not a finite positive number.
        InvalidCost: A cost coefficient is not a finite positive number.
        NegativeDemand: A load's demand is negative.
        DuplicateParticipant: An identifier repeats.
        ParseError: Total demand is not finite.
    """
    if not cfg.generators:
        raise EmptyParticipants('At least one generator required')
    if not cfg.loads:
        raise EmptyParticipants('At least one load required')
    for name, slope in (('slope_da', cfg.slope_da), ('slope_rt', cfg.slope_rt)):
        if not math.isfinite(slope) or slope <= 0:
            raise InvalidSlope(f'{name} must be positive, got {slope}')
    for generator in cfg.generators:
        if not math.isfinite(generator.cost_coeff) \
                or generator.cost_coeff <= 0:
            raise InvalidCost(
                f'Generator {generator.id} cost_coeff must be positive, '
                f'got {generator.cost_coeff}'
            )
    for load in cfg.loads:
        if math.isnan(load.demand) or load.demand < 0:
            raise NegativeDemand(
                f'Load {load.id} demand must be nonnegative, got {load.demand}'
            )
    ids = cfg.generator_ids + cfg.load_ids
    if len(set(ids)) != len(ids):
        raise DuplicateParticipant(
            'Participant identifiers must be distinct across generators and '
            'loads'
        )
    if not math.isfinite(cfg.aggregate_demand):
        raise ParseError('Aggregate demand is not finite')
    _costs(cfg.generators)
    _inverse_cost_sum(cfg.generators)
    _demands(cfg.loads)
    return cfg


def validate_bids(bids: BidProfile, cfg: MarketConfig) -> BidProfile:
    """Checks that a bid profile respects every load's total demand and, for
    slope bids, that slopes are nonnegative.

    Raises:
        SplitMismatch: A load's stage quantities do not sum to its demand.
        InvalidSlope: A slope bid is negative.
    """
    for load in cfg.loads:
        total = bids.load_da[load.id] + bids.load_rt[load.id]
        if abs(total - load.demand) \
                > utils.RELATIVE_TOLERANCE * utils.relative_scale(load.demand):
            raise SplitMismatch(
                f'Load {load.id} buys {total} in total, demand is {load.demand}'
            )
    if bids.bid_kind == BidKind.SLOPE:
        for stage in Stage:
            for gen_id, slope in bids.generator_bids(stage).items():
                if slope < 0:
                    raise InvalidSlope(
                        f'Generator {gen_id} slope bid is negative: {slope}'
                    )
    return bids


def load_demand_bids(path: str) -> typing.List[LoadParams]:
    """Reads loads from a CSV file with header ``load_id,demand_mw``.

    Args:
        path
            Path of the CSV file.

    Returns:
        One load per row, in file order.

    Raises:
        ParseError: The header or a row is malformed.
        NegativeDemand: A row declares negative demand.
        EmptyParticipants: The file has a header but no rows.
    """
    try:
        with warnings.catch_warnings():
            # Rows with surplus fields only warn.
            warnings.simplefilter('error', pd.errors.ParserWarning)
            frame = pd.read_csv(
                path,
                dtype=str,
                keep_default_na=False,
                skipinitialspace=True,
                index_col=False
            )
    except (pd.errors.EmptyDataError, pd.errors.ParserError,
            pd.errors.ParserWarning) as e:
        raise ParseError(f'Could not read demand bids from {path}') from e
    if tuple(frame.columns) != DEMAND_CSV_HEADER:
        raise ParseError(
            'Expected header ' + ','.join(DEMAND_CSV_HEADER)
            + ', got ' + ','.join(str(c) for c in frame.columns)
        )
    if frame.empty:
        raise EmptyParticipants(f'No loads in {path}')

    loads = []
    for row_number, (load_id, demand_text) in enumerate(
        frame.itertuples(index=False, name=None),
        start=2
    ):
        if not isinstance(load_id, str) or not load_id.strip():
            raise ParseError(f'Row {row_number}: missing load_id')
        try:
            demand = float(demand_text)
        except (TypeError, ValueError) as e:
            raise ParseError(
                f'Row {row_number}: demand_mw {demand_text!r} is not a number'
            ) from e
        if not math.isfinite(demand):
            raise ParseError(f'Row {row_number}: demand_mw is not finite')
        if demand < 0:
            raise NegativeDemand(
                f'Row {row_number}: load {load_id} demand is negative'
            )
        loads.append(LoadParams(id=load_id.strip(), demand=demand))
    return loads


def config_from_dict(
    values: typing.Mapping[str, typing.Any]
) -> MarketConfig:
    """Builds and validates a configuration from its JSON object form.

    Raises:
        ParseError: A key is missing or a value has the wrong type.
    """
    try:
        cfg = MarketConfig(
            generators=tuple(
                GeneratorParams(
                    id=str(g['id']),
                    cost_coeff=float(g['cost_coeff'])
                )
                for g in values['generators']
            ),
            loads=tuple(
                LoadParams(id=str(l['id']), demand=float(l['demand_mw']))
                for l in values['loads']
            ),
            slope_da=float(values['slope_da']),
            slope_rt=float(values['slope_rt'])
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f'Malformed market configuration: {e}') from e
    return validate_config(cfg)


def config_to_dict(cfg: MarketConfig) -> typing.Dict[str, typing.Any]:
    """Returns the JSON object form of a configuration, as read by
    :py:func:`config_from_dict`.
    """
    return {
        'generators': [
            {'id': g.id, 'cost_coeff': g.cost_coeff} for g in cfg.generators
        ],
        'loads': [
            {'id': l.id, 'demand_mw': l.demand} for l in cfg.loads
        ],
        'slope_da': cfg.slope_da,
        'slope_rt': cfg.slope_rt
    }


def read_config(path: str) -> MarketConfig:
    """Reads and validates a JSON configuration file.

    Raises:
        ParseError: The file is not valid JSON or lacks a required key.
    """
    with open(path, encoding='utf8') as f:
        try:
            values = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f'{path} is not valid JSON') from e
    if not isinstance(values, dict):
        raise ParseError(f'{path} does not hold a JSON object')
    return config_from_dict(values)


def homogeneous_config(
    num_generators: int,
    cost_coeff: float,
    demands: typing.Sequence[float],
    slope_da: float,
    slope_rt: float
) -> MarketConfig:
    """Builds a validated configuration of identical generators named
    ``G1, G2, ...`` and loads named ``L1, L2, ...``.
    """
    return validate_config(MarketConfig(
        generators=tuple(
            GeneratorParams(id=f'G{j + 1}', cost_coeff=cost_coeff)
            for j in range(num_generators)
        ),
        loads=tuple(
            LoadParams(id=f'L{l + 1}', demand=float(demand))
            for l, demand in enumerate(demands)
        ),
        slope_da=slope_da,
        slope_rt=slope_rt
    ))
