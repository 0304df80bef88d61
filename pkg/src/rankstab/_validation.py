"""Exceptions and small input-validation helpers shared across the package."""
from __future__ import annotations

import math

TOL = 1e-9


class RankstabError(ValueError):
    """Base class for all errors raised by this package."""


class ParseError(RankstabError):
    """A text file could not be parsed."""


class InvariantError(RankstabError):
    """Input data violates a structural invariant (monotone weights, boundary of boundary, ...)."""


class UnsupportedError(RankstabError):
    """A valid input was combined with an option it does not support."""


def check_real(x, name: str = "value") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise RankstabError(f"{name} must be finite, got {x!r}")
    return x


def check_order(p, name: str = "p", allow_inf: bool = True) -> float:
    """Validate an exponent ``p >= 1`` (optionally allowing ``inf``)."""
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise RankstabError(f"{name} must be a number >= 1, got {p!r}") from None
    if math.isnan(p) or p < 1:
        raise RankstabError(f"{name} must be >= 1, got {p!r}")
    if math.isinf(p) and not allow_inf:
        raise RankstabError(f"{name} must be finite, got {p!r}")
    return p


def format_real(x: float) -> str:
    """Shortest round-trip decimal form; integral values drop the trailing ``.0``."""
    x = float(x)
    if x == 0:
        return "0"
    s = repr(x)
    if s.endswith(".0"):
        s = s[:-2]
    return s
