"""Persistence diagrams as finite signed multisets of intervals, and couplings."""
from __future__ import annotations

import io
import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ._validation import ParseError, RankstabError, format_real
from .geometry import Interval, IntervalLike, MetricKind, as_interval, d_to_diagonal, distance

__all__ = [
    "Diagram",
    "Coupling",
    "split_signed",
    "cost",
    "enumerate_couplings",
    "count_couplings",
    "parse_diagram",
    "format_diagram",
    "read_diagram",
    "write_diagram",
    "MAX_ENUMERATION_POINTS",
]

MAX_ENUMERATION_POINTS = 8


class Diagram:
    """Finite formal sum of intervals with nonzero integer multiplicities.

    Entries are kept in canonical form: sorted by ``(birth, death)`` with
    equal intervals merged and zero multiplicities dropped.  Diagrams are
    immutable and hashable; ``+``, ``-`` and unary ``-`` act on the formal
    sums.

    Parameters
    ----------
    entries : iterable
        Items are ``(birth, death)``, ``(birth, death, multiplicity)``,
        ``(Interval, multiplicity)`` pairs or :class:`Interval` objects.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Iterable = ()):
        counts: Counter = Counter()
        for e in entries:
            if isinstance(e, Interval):
                counts[e] += 1
                continue
            e = tuple(e)
            if len(e) == 2 and isinstance(e[0], Interval):
                iv, mult = e
            elif len(e) == 2:
                iv, mult = Interval(*e), 1
            elif len(e) == 3:
                iv, mult = Interval(e[0], e[1]), e[2]
            else:
                raise RankstabError(f"cannot interpret diagram entry {e!r}")
            if int(mult) != mult:
                raise RankstabError(f"multiplicity must be an integer, got {mult!r}")
            counts[iv] += int(mult)
        self._items = tuple(sorted((iv, m) for iv, m in counts.items() if m != 0))
        self._hash = None

    @classmethod
    def from_array(cls, X, multiplicities=None) -> "Diagram":
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        if multiplicities is None:
            return cls(map(tuple, X))
        return cls((b, d, int(m)) for (b, d), m in zip(X, multiplicities))

    @property
    def items(self) -> tuple[tuple[Interval, int], ...]:
        return self._items

    def intervals(self) -> list[Interval]:
        """Intervals repeated according to multiplicity (ordinary diagrams only)."""
        if not self.is_ordinary():
            raise RankstabError("signed diagram has no expansion into repeated intervals")
        return [iv for iv, m in self._items for _ in range(m)]

    def to_array(self) -> np.ndarray:
        """``(n, 2)`` array of the expanded intervals."""
        ivs = self.intervals()
        if not ivs:
            return np.zeros((0, 2))
        return np.array([(iv.birth, iv.death) for iv in ivs], dtype=float)

    def is_ordinary(self) -> bool:
        return all(m > 0 for _, m in self._items)

    def total_mass(self) -> int:
        return sum(abs(m) for _, m in self._items)

    def multiplicity(self, x: IntervalLike) -> int:
        x = as_interval(x)
        for iv, m in self._items:
            if iv == x:
                return m
        return 0

    def max_multiplicity(self) -> int:
        return max((abs(m) for _, m in self._items), default=0)

    def __len__(self):
        return self.total_mass()

    def __bool__(self):
        return bool(self._items)

    def __iter__(self) -> Iterator[tuple[Interval, int]]:
        return iter(self._items)

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __add__(self, other: "Diagram") -> "Diagram":
        return Diagram(itertools.chain(self._items, other._items))

    def __neg__(self) -> "Diagram":
        return Diagram((iv, -m) for iv, m in self._items)

    def __sub__(self, other: "Diagram") -> "Diagram":
        return self + (-other)

    def __repr__(self):
        body = ", ".join(
            f"({format_real(iv.birth)}, {format_real(iv.death)})" + ("" if m == 1 else f"x{m}")
            for iv, m in self._items
        )
        return f"Diagram([{body}])"


def split_signed(alpha: Diagram) -> tuple[Diagram, Diagram]:
    """Positive and negative parts ``(alpha_plus, alpha_minus)`` of a signed diagram."""
    pos = Diagram((iv, m) for iv, m in alpha if m > 0)
    neg = Diagram((iv, -m) for iv, m in alpha if m < 0)
    return pos, neg


@dataclass(frozen=True)
class Coupling:
    """Partial matching between two diagrams; unmatched points go to the diagonal."""

    matched: tuple[tuple[Interval, Interval], ...] = ()
    left_unmatched: tuple[Interval, ...] = ()
    right_unmatched: tuple[Interval, ...] = ()

    def left_diagram(self) -> Diagram:
        return Diagram([x for x, _ in self.matched] + list(self.left_unmatched))

    def right_diagram(self) -> Diagram:
        return Diagram([y for _, y in self.matched] + list(self.right_unmatched))

    def is_coupling_of(self, alpha: Diagram, beta: Diagram) -> bool:
        return self.left_diagram() == alpha and self.right_diagram() == beta

    def format(self) -> str:
        lines = []
        for x, y in self.matched:
            lines.append(f"{format_real(x.birth)} {format_real(x.death)} -> {format_real(y.birth)} {format_real(y.death)}")
        for x in self.left_unmatched:
            lines.append(f"{format_real(x.birth)} {format_real(x.death)} -> diagonal")
        for y in self.right_unmatched:
            lines.append(f"diagonal -> {format_real(y.birth)} {format_real(y.death)}")
        return "\n".join(lines)


def _aggregate(costs: Iterable[float], p: float) -> float:
    costs = list(costs)
    if not costs:
        return 0.0
    if math.isinf(p):
        return max(costs)
    if p == 1:
        return math.fsum(costs)
    return math.fsum(c**p for c in costs) ** (1.0 / p)


def cost(gamma: Coupling, m: MetricKind, p: float = 1.0) -> float:
    """``p``-aggregated cost of a coupling (``p = inf`` takes the maximum)."""
    parts = [distance(x, y, m) for x, y in gamma.matched]
    parts += [d_to_diagonal(x, m) for x in gamma.left_unmatched]
    parts += [d_to_diagonal(y, m) for y in gamma.right_unmatched]
    return _aggregate(parts, float(p))


def _partial_injections(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Maps ``i -> assignment[i]`` with ``-1`` meaning "sent to the diagonal"."""
    # depth-first over left points; `used` tracks right points already taken
    assignment = [-1] * n
    used = [False] * k

    def rec(i):
        if i == n:
            yield tuple(assignment)
            return
        assignment[i] = -1
        yield from rec(i + 1)
        for j in range(k):
            if not used[j]:
                used[j] = True
                assignment[i] = j
                yield from rec(i + 1)
                used[j] = False
        assignment[i] = -1

    return rec(0)


def count_couplings(n: int, k: int) -> int:
    """Number of partial matchings between ``n`` and ``k`` distinguishable points."""
    return sum(math.comb(n, j) * math.comb(k, j) * math.factorial(j) for j in range(min(n, k) + 1))


def _check_enumerable(alpha: Diagram, beta: Diagram):
    for name, dg in (("left", alpha), ("right", beta)):
        if not dg.is_ordinary():
            raise RankstabError(f"{name} diagram is signed; couplings need ordinary diagrams")
        if dg.total_mass() > MAX_ENUMERATION_POINTS:
            raise RankstabError(
                f"{name} diagram has {dg.total_mass()} points; exhaustive enumeration "
                f"is limited to {MAX_ENUMERATION_POINTS}"
            )


def enumerate_couplings(alpha: Diagram, beta: Diagram) -> Iterator[Coupling]:
    """Every coupling between two small ordinary diagrams.

    Points of equal intervals are treated as distinguishable copies, so the
    stream has exactly :func:`count_couplings` elements.
    """
    _check_enumerable(alpha, beta)
    xs, ys = alpha.intervals(), beta.intervals()
    for assignment in _partial_injections(len(xs), len(ys)):
        taken = set(j for j in assignment if j >= 0)
        yield Coupling(
            matched=tuple((xs[i], ys[j]) for i, j in enumerate(assignment) if j >= 0),
            left_unmatched=tuple(xs[i] for i, j in enumerate(assignment) if j < 0),
            right_unmatched=tuple(y for j, y in enumerate(ys) if j not in taken),
        )


# -- text format --------------------------------------------------------------


def parse_diagram(text: str, source: str = "<string>") -> Diagram:
    """Parse ``birth death [multiplicity]`` lines; ``#`` starts a comment."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"{source}:{lineno}: expected 'birth death [multiplicity]', got {raw!r}")
        try:
            b, d = float(fields[0]), float(fields[1])
            mult = int(fields[2]) if len(fields) == 3 else 1
        except ValueError:
            raise ParseError(f"{source}:{lineno}: malformed number in {raw!r}") from None
        if not (math.isfinite(b) and math.isfinite(d)):
            raise ParseError(f"{source}:{lineno}: endpoints must be finite")
        if b > d:
            raise ParseError(f"{source}:{lineno}: birth {b} exceeds death {d}")
        entries.append((b, d, mult))
    return Diagram(entries)


def format_diagram(alpha: Diagram) -> str:
    buf = io.StringIO()
    for iv, m in alpha:
        buf.write(f"{format_real(iv.birth)} {format_real(iv.death)} {m}\n")
    return buf.getvalue()


def read_diagram(path: str | os.PathLike) -> Diagram:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_diagram(text, str(path))


def write_diagram(alpha: Diagram, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_diagram(alpha))
