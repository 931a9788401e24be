"""
Methods to provide equilibrium solvers given a regime and a behavior.
"""

import typing

from marketlab.market import (Behavior, EquilibriumResult, MarketConfig,
                              Regime)

from .da_mpm import competitive_da_mpm, nash_da_mpm
from .rt_mpm import competitive_rt_mpm, nash_rt_mpm
from .slope import competitive_slope, nash_slope
from .standard import competitive_standard, nash_standard

Solver = typing.Callable[..., EquilibriumResult]


class CompetitiveNashSolvers(typing.NamedTuple):
    """
    The competitive and Nash solvers of one regime.
    """

    competitive: Solver
    """
    Solves for a competitive equilibrium; may accept keyword options
    selecting among non-unique equilibria.
    """

    nash: Solver
    """
    Solves for the Nash equilibrium.
    """


_SOLVER_MAPPING = {
    Regime.STANDARD: CompetitiveNashSolvers(
        competitive_standard, nash_standard
    ),
    Regime.RT_MPM: CompetitiveNashSolvers(
        competitive_rt_mpm, nash_rt_mpm
    ),
    Regime.DA_MPM: CompetitiveNashSolvers(
        competitive_da_mpm, nash_da_mpm
    ),
    Regime.SLOPE_STANDARD: CompetitiveNashSolvers(
        competitive_slope, nash_slope
    )
}


def create_solver(regime: Regime, behavior: Behavior) -> Solver:
    """Returns the solver for the given regime and behavior.

    Raises:
        KeyError: No solver corresponds to ``regime``.
    """
    solvers = _SOLVER_MAPPING[regime]
    if behavior == Behavior.COMPETITIVE:
        return solvers.competitive
    return solvers.nash


def solve_equilibrium(
    cfg: MarketConfig,
    regime: Regime,
    behavior: Behavior,
    **options: typing.Any
) -> EquilibriumResult:
    """Solves for the equilibrium of ``cfg`` under ``regime`` and
    ``behavior``.

    Args:
        cfg
            Validated market configuration.
        regime
            Market design.
        behavior
            Competitive or Nash.
        options
            Keyword options of the competitive solvers (``da_load_split``,
            ``split_choice``); the Nash solvers take none.

    Raises:
        MarketError: The configuration violates the solver's preconditions.
    """
    return create_solver(regime, behavior)(cfg, **options)
