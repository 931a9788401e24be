"""Classes describing how each market design turns bids into outcomes.

The abstract base class is :py:class:`Mechanism`. A mechanism clears a
:py:class:`~marketlab.market.BidProfile` stage by stage, and also answers how
real-time followers respond to a day-ahead outcome, which is what a
participant anticipates when it deviates day-ahead.
"""

import abc
import typing

from marketlab import clearing, utils
from marketlab.market import (BidKind, BidProfile, MarketConfig, Regime,
                              Stage, StageOutcome, TwoStageOutcome)


class Mechanism(abc.ABC):
    """A two-stage market design.
    """

    @staticmethod
    @abc.abstractmethod
    def get_regime() -> Regime:
        """The regime this mechanism implements."""
        return Regime.STANDARD

    REGIME = utils.readonly_static_property(get_regime)
    """The regime this mechanism implements."""

    @staticmethod
    def get_bid_kind() -> BidKind:
        """The family of supply functions generators submit."""
        return BidKind.INTERCEPT

    BID_KIND = utils.readonly_static_property(get_bid_kind)
    """The family of supply functions generators submit."""

    @staticmethod
    @abc.abstractmethod
    def get_generator_stages() -> typing.Tuple[Stage, ...]:
        """The stages in which generators' own bids are cleared."""
        return ()

    GENERATOR_STAGES = utils.readonly_static_property(get_generator_stages)
    """The stages in which generators' own bids are cleared; in the other
    stage, if any, bids are replaced by default cost-based bids.
    """

    @classmethod
    @abc.abstractmethod
    def clear_day_ahead(
        cls,
        cfg: MarketConfig,
        bids: BidProfile
    ) -> StageOutcome:
        """Clears the day-ahead stage from the submitted bids."""
        raise NotImplementedError()

    @classmethod
    @abc.abstractmethod
    def clear_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        """Clears the real-time stage from the submitted bids, given the
        day-ahead outcome.
        """
        raise NotImplementedError()

    @classmethod
    @abc.abstractmethod
    def respond_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        """Returns the real-time equilibrium among generators that follows a
        given day-ahead outcome, with loads' real-time quantities taken from
        ``bids``.
        """
        raise NotImplementedError()

    @classmethod
    def clear(cls, cfg: MarketConfig, bids: BidProfile) -> TwoStageOutcome:
        """Clears both stages from the submitted bids."""
        day_ahead = cls.clear_day_ahead(cfg, bids)
        return TwoStageOutcome(
            day_ahead=day_ahead,
            real_time=cls.clear_real_time(cfg, bids, day_ahead),
            bids=bids
        )

    @classmethod
    def respond(cls, cfg: MarketConfig, bids: BidProfile) -> TwoStageOutcome:
        """Clears the day-ahead stage from the submitted bids, then lets
        generators play the real-time subgame.
        """
        day_ahead = cls.clear_day_ahead(cfg, bids)
        return TwoStageOutcome(
            day_ahead=day_ahead,
            real_time=cls.respond_real_time(cfg, bids, day_ahead),
            bids=bids
        )


class StandardMarket(Mechanism):
    """Intercept bids in both stages, no mitigation."""

    @staticmethod
    def get_regime() -> Regime:
        return Regime.STANDARD

    @staticmethod
    def get_generator_stages() -> typing.Tuple[Stage, ...]:
        return (Stage.DAY_AHEAD, Stage.REAL_TIME)

    @classmethod
    def clear_day_ahead(
        cls,
        cfg: MarketConfig,
        bids: BidProfile
    ) -> StageOutcome:
        return clearing.clear_intercept_stage(
            bids.gen_intercepts_da, cfg.slope_da, bids.load_da
        )

    @classmethod
    def clear_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        return clearing.clear_intercept_stage(
            bids.gen_intercepts_rt, cfg.slope_rt, bids.load_rt
        )

    @classmethod
    def respond_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        return clearing.augmented_planner(
            cfg, day_ahead.gen_dispatch, bids.load_rt
        )


class RealTimeMitigatedMarket(StandardMarket):
    """Intercept bids day-ahead; real-time bids replaced by default bids that
    supply ``price / c_j`` in total across both stages.
    """

    @staticmethod
    def get_regime() -> Regime:
        return Regime.RT_MPM

    @staticmethod
    def get_generator_stages() -> typing.Tuple[Stage, ...]:
        return (Stage.DAY_AHEAD,)

    @classmethod
    def clear_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        return clearing.clear_default_stage(
            cfg, bids.load_rt, day_ahead.gen_dispatch
        )

    @classmethod
    def respond_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        return cls.clear_real_time(cfg, bids, day_ahead)


class DayAheadMitigatedMarket(StandardMarket):
    """Day-ahead bids replaced by default bids ``price / c_j``; intercept bids
    in real time.
    """

    @staticmethod
    def get_regime() -> Regime:
        return Regime.DA_MPM

    @staticmethod
    def get_generator_stages() -> typing.Tuple[Stage, ...]:
        return (Stage.REAL_TIME,)

    @classmethod
    def clear_day_ahead(
        cls,
        cfg: MarketConfig,
        bids: BidProfile
    ) -> StageOutcome:
        return clearing.clear_default_stage(cfg, bids.load_da)


class SlopeBidMarket(Mechanism):
    """Slope bids in both stages, no mitigation."""

    @staticmethod
    def get_regime() -> Regime:
        return Regime.SLOPE_STANDARD

    @staticmethod
    def get_bid_kind() -> BidKind:
        return BidKind.SLOPE

    @staticmethod
    def get_generator_stages() -> typing.Tuple[Stage, ...]:
        return (Stage.DAY_AHEAD, Stage.REAL_TIME)

    @classmethod
    def clear_day_ahead(
        cls,
        cfg: MarketConfig,
        bids: BidProfile
    ) -> StageOutcome:
        return clearing.clear_slope_stage(
            bids.generator_bids(Stage.DAY_AHEAD), bids.load_da
        )

    @classmethod
    def clear_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        return clearing.clear_slope_stage(
            bids.generator_bids(Stage.REAL_TIME), bids.load_rt
        )

    @classmethod
    def respond_real_time(
        cls,
        cfg: MarketConfig,
        bids: BidProfile,
        day_ahead: StageOutcome
    ) -> StageOutcome:
        if bids.aggregate_load_rt == 0:
            return cls.clear_real_time(cfg, bids, day_ahead)
        return clearing.slope_subgame(
            cfg, day_ahead.gen_dispatch, bids.load_rt
        ).outcome


_MECHANISM_MAPPING: typing.Mapping[Regime, typing.Type[Mechanism]] = {
    Regime.STANDARD: StandardMarket,
    Regime.RT_MPM: RealTimeMitigatedMarket,
    Regime.DA_MPM: DayAheadMitigatedMarket,
    Regime.SLOPE_STANDARD: SlopeBidMarket
}


def create_mechanism(regime: Regime) -> typing.Type[Mechanism]:
    """Returns the class implementing the given regime.

    Raises:
        KeyError: No mechanism implements ``regime``.
    """
    return _MECHANISM_MAPPING[regime]
