"""Exceptions and warning categories raised by :py:mod:`marketlab`.

Every domain failure is a :py:class:`MarketError`, which is a
:py:class:`ValueError` so that callers treating malformed input generically
keep working.
"""


class MarketError(ValueError):
    """Base class of all domain errors."""


class InvalidSlope(MarketError):
    """An intercept-bid slope is not strictly positive, or a slope bid is
    negative.
    """


class InvalidCost(MarketError):
    """A generator cost coefficient is not strictly positive."""


class EmptyParticipants(MarketError):
    """A market has no generators or no loads."""


class DuplicateParticipant(MarketError):
    """Two participants share an identifier."""


class ParseError(MarketError):
    """A configuration, demand or bids file is malformed."""


class NegativeDemand(MarketError):
    """A load declares a negative total demand."""


class DegeneratePrice(MarketError):
    """A stage has demand to serve but no supply responding to price."""


class TooFewGenerators(MarketError):
    """The operation needs more generators than the market has."""


class HeterogeneousUnsupported(MarketError):
    """The operation is only defined for identical generator costs."""


class SplitMismatch(MarketError):
    """A load's day-ahead and real-time quantities do not add up to its
    demand.
    """


class MetricDivisionByZero(MarketError):
    """A competitive aggregate used as a normalizer is zero."""


class UnsupportedRegimePair(MarketError):
    """The requested participant stage or behavior has no free decision
    under the given regime.
    """


class InvalidRange(MarketError):
    """A sweep axis is empty or holds values outside its domain."""


class NegativeAllocationWarning(UserWarning):
    """A load's day-ahead allocation at equilibrium is negative."""


class SanityBandWarning(UserWarning):
    """A normalized day-ahead allocation lies outside [-1, 2]."""
