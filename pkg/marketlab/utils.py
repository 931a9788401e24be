"""
Utility classes and methods.
"""

import typing

import numpy as np

RELATIVE_TOLERANCE = 1e-9
"""Relative tolerance of every balance and inelasticity check."""


def relative_scale(*magnitudes: float) -> float:
    """
    Returns ``max(1, |m| for m in magnitudes)``, the scale against which
    relative tolerances are applied.
    """
    return max([1.0] + [abs(float(m)) for m in magnitudes])


def is_close(
    a: float,
    b: float,
    rel: float = RELATIVE_TOLERANCE
) -> bool:
    """
    Returns whether ``a`` and ``b`` agree within ``rel`` relative to
    ``max(1, |a|, |b|)``.
    """
    return abs(a - b) <= rel * relative_scale(a, b)


def as_array(
    ids: typing.Sequence[str],
    mapping: typing.Mapping[str, float]
) -> np.ndarray:
    """
    Returns the values of ``mapping`` as a float array ordered by ``ids``.
    """
    return np.array([float(mapping[i]) for i in ids], dtype=float)


def as_map(
    ids: typing.Sequence[str],
    values: typing.Iterable[float]
) -> typing.Dict[str, float]:
    """
    Returns a ``dict`` from each of ``ids`` to the corresponding value,
    iterating in the order of ``ids``.
    """
    return {i: float(v) for i, v in zip(ids, values)}


ReadonlyStaticPropertyTypeVar = typing.TypeVar(
    'ReadonlyStaticPropertyTypeVar'
)


class readonly_static_property(  # pylint: disable=invalid-name,too-few-public-methods
    typing.Generic[ReadonlyStaticPropertyTypeVar]
):
    """
    A static property that calls the first method in an object's MRO of the
    same name as that of the provided method.

    Used by :py:class:`marketlab.mechanism.Mechanism` subclasses to expose
    per-regime constants that subclasses override.

    Args:
        getter
            The method the name of which is that of the method to call.
    """

    def __init__(
        self,
        getter: typing.Callable[[], ReadonlyStaticPropertyTypeVar]
    ) -> None:
        self._getter = getter

    def __get__(
        self,
        obj: typing.Any,
        cls: typing.Optional[typing.Type[typing.Any]] = None
    ) -> ReadonlyStaticPropertyTypeVar:
        if cls is None:
            cls = type(obj)
        return typing.cast(
            ReadonlyStaticPropertyTypeVar,
            getattr(cls, self._getter.__name__)()
        )
