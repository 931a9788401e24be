"""Helpers shared by the closed-form equilibrium solvers."""

import typing

import numpy as np

from marketlab import utils
from marketlab.errors import SplitMismatch, TooFewGenerators
from marketlab.market import (Behavior, BidKind, BidProfile,
                              EquilibriumResult, FloatMap, MarketConfig,
                              Regime, StageOutcome, TwoStageOutcome,
                              frozen_map)


def require_generators(cfg: MarketConfig, minimum: int, context: str) -> None:
    """
    Raises:
        TooFewGenerators: The market has fewer than ``minimum`` generators.
    """
    if cfg.num_generators < minimum:
        raise TooFewGenerators(
            f'|G| >= {minimum} required for {context}, '
            f'got {cfg.num_generators}'
        )


def resolve_split(
    cfg: MarketConfig,
    da_load_split: typing.Optional[FloatMap],
    default_fraction: float
) -> np.ndarray:
    """Returns each load's day-ahead quantity, in configuration order.

    Args:
        cfg
            Market configuration.
        da_load_split
            Day-ahead quantity per load, or ``None`` for the default.
        default_fraction
            Share of each load's demand bought day-ahead by default.

    Raises:
        SplitMismatch: ``da_load_split`` does not name exactly the
            configured loads, or holds a non-finite quantity.
    """
    if da_load_split is None:
        return default_fraction * cfg.demands
    if set(da_load_split) != set(cfg.load_ids):
        raise SplitMismatch(
            'Day-ahead split must name every load exactly once'
        )
    split = utils.as_array(cfg.load_ids, da_load_split)
    if not np.all(np.isfinite(split)):
        raise SplitMismatch('Day-ahead split holds a non-finite quantity')
    return split


def intercept_bids(
    cfg: MarketConfig,
    beta_da: typing.Iterable[float],
    beta_rt: typing.Iterable[float],
    load_da: typing.Iterable[float]
) -> BidProfile:
    """Builds an intercept-bid profile in which loads buy the rest of their
    demand in real time.
    """
    load_da = np.asarray(list(load_da), dtype=float)
    return BidProfile(
        bid_kind=BidKind.INTERCEPT,
        gen_intercepts_da=frozen_map(cfg.generator_ids, beta_da),
        gen_intercepts_rt=frozen_map(cfg.generator_ids, beta_rt),
        load_da=frozen_map(cfg.load_ids, load_da),
        load_rt=frozen_map(cfg.load_ids, cfg.demands - load_da)
    )


def slope_bids(
    cfg: MarketConfig,
    slopes_da: typing.Iterable[float],
    slopes_rt: typing.Iterable[float],
    load_da: typing.Iterable[float]
) -> BidProfile:
    """Builds a slope-bid profile in which loads buy the rest of their demand
    in real time.
    """
    zeros = np.zeros(cfg.num_generators)
    return intercept_bids(cfg, zeros, zeros, load_da)._replace(
        bid_kind=BidKind.SLOPE,
        gen_slopes_da=frozen_map(cfg.generator_ids, slopes_da),
        gen_slopes_rt=frozen_map(cfg.generator_ids, slopes_rt)
    )


def stage(
    cfg: MarketConfig,
    price: float,
    dispatch: typing.Iterable[float],
    load_alloc: FloatMap,
    degenerate: bool = False
) -> StageOutcome:
    """Builds a stage outcome with dispatch keyed by generator."""
    return StageOutcome(
        price=float(price),
        gen_dispatch=frozen_map(cfg.generator_ids, dispatch),
        load_alloc=load_alloc,
        degenerate=degenerate
    )


def result(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    regime: Regime,
    behavior: Behavior,
    day_ahead: StageOutcome,
    real_time: StageOutcome,
    bids: BidProfile,
    degrees_of_freedom: str = '',
    symmetric: bool = True,
    negative_allocations: typing.Tuple[str, ...] = ()
) -> EquilibriumResult:
    """Assembles an equilibrium result from its two stages."""
    return EquilibriumResult(
        regime=regime,
        behavior=behavior,
        outcome=TwoStageOutcome(
            day_ahead=day_ahead,
            real_time=real_time,
            bids=bids
        ),
        degrees_of_freedom=degrees_of_freedom,
        symmetric=symmetric,
        negative_allocations=negative_allocations
    )


def system_price(cfg: MarketConfig) -> float:
    """``d / sum(1 / c)``, the competitive price of every regime."""
    return cfg.aggregate_demand / cfg.inverse_cost_sum


def proportional_dispatch(cfg: MarketConfig, quantity: float) -> np.ndarray:
    """Splits ``quantity`` among generators in proportion to ``1 / c_j``."""
    return quantity / cfg.inverse_cost_sum / cfg.costs
