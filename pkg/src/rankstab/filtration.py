"""Weighted cell complexes, sublevel persistence and chain-level stability checks.

A :class:`WeightedComplex` is a finite regular cell complex given by its
boundary incidences, together with a monotone weight ``w: K -> [a, b]``.
Persistent homology of the sublevel filtration is computed over GF(2) by
the standard column reduction.  Classes that never die are given the finite
death value ``horizon``, which defaults to ``2b - a``: the chain groups are
then the free modules ``[w(sigma), 2b - a]``, one per cell, and every bar
is a finite interval.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from ._validation import TOL, InvariantError, ParseError, RankstabError, check_order, format_real
from .diagram import Coupling, Diagram
from .geometry import Interval, MetricKind, distance
from .report import Report
from .transport import wasserstein

__all__ = [
    "Cell",
    "WeightedComplex",
    "FreeModule",
    "GradedDiagramFamily",
    "filtration_order",
    "persistence_pairs",
    "compute_diagrams",
    "free_modules",
    "free_module_diagram",
    "free_module_distance",
    "are_compatible",
    "segment_path",
    "verify_barcode_stability",
    "verify_wp_stability",
    "critical_cell_coupling",
    "homology_rank",
    "parse_complex",
    "parse_weights",
    "format_complex",
    "format_weights",
    "read_complex",
    "read_weights",
]

CellId = Hashable


@dataclass(frozen=True)
class Cell:
    id: CellId
    dim: int
    boundary: tuple[tuple[CellId, int], ...] = ()


class WeightedComplex:
    """Finite cell complex with a monotone weight on its cells.

    Parameters
    ----------
    cells : iterable of Cell or tuples
        ``(id, dim, boundary)`` where ``boundary`` lists face ids or
        ``(face id, coefficient)`` pairs with coefficients ``+1``/``-1``.
    weight : mapping
        Cell id to real weight.
    bounds : (a, b), optional
        Weight range; defaults to the smallest and largest weight.
    """

    def __init__(self, cells: Iterable, weight: Mapping[CellId, float], bounds: tuple[float, float] | None = None):
        parsed = []
        for c in cells:
            if not isinstance(c, Cell):
                cid, dim, *rest = c
                bd = rest[0] if rest else ()
                c = Cell(cid, int(dim), tuple(f if isinstance(f, tuple) else (f, 1) for f in bd))
            parsed.append(c)
        self.cells: tuple[Cell, ...] = tuple(parsed)
        self.index = {c.id: i for i, c in enumerate(self.cells)}
        if len(self.index) != len(self.cells):
            raise InvariantError("duplicate cell ids")
        self._check_boundaries()
        if bounds is None:
            ws = [float(weight[c.id]) for c in self.cells] if self.cells else [0.0]
            bounds = (min(ws), max(ws))
        a, b = float(bounds[0]), float(bounds[1])
        if not (math.isfinite(a) and math.isfinite(b)) or a > b:
            raise InvariantError(f"invalid weight bounds ({a}, {b})")
        self.bounds = (a, b)
        self.weight = self.check_weight(weight)

    @property
    def horizon(self) -> float:
        """``2b - a``, the smallest horizon for which chain-level stability holds."""
        a, b = self.bounds
        return 2 * b - a

    @property
    def max_dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def __len__(self):
        return len(self.cells)

    def cells_of_dim(self, i: int) -> list[Cell]:
        return [c for c in self.cells if c.dim == i]

    def with_weight(self, weight: Mapping[CellId, float]) -> "WeightedComplex":
        return WeightedComplex(self.cells, weight, self.bounds)

    def _check_boundaries(self):
        for c in self.cells:
            if c.dim < 0:
                raise InvariantError(f"cell {c.id!r} has negative dimension")
            for f, coeff in c.boundary:
                if f not in self.index:
                    raise InvariantError(f"cell {c.id!r} has unknown face {f!r}")
                if self.cells[self.index[f]].dim != c.dim - 1:
                    raise InvariantError(f"face {f!r} of cell {c.id!r} has the wrong dimension")
                if coeff not in (1, -1):
                    raise InvariantError(f"boundary coefficient {coeff} of cell {c.id!r} is not +-1")
        # boundary of a boundary must vanish mod 2
        for c in self.cells:
            parity: dict = {}
            for f, _ in c.boundary:
                for g, _ in self.cells[self.index[f]].boundary:
                    parity[g] = parity.get(g, 0) ^ 1
            if any(parity.values()):
                raise InvariantError(f"boundary of the boundary of cell {c.id!r} is nonzero")

    def check_weight(self, weight: Mapping[CellId, float]) -> dict:
        """Validate a weight against this complex and return it as a plain dict."""
        a, b = self.bounds
        out = {}
        for c in self.cells:
            if c.id not in weight:
                raise InvariantError(f"no weight for cell {c.id!r}")
            x = float(weight[c.id])
            if not math.isfinite(x) or x < a or x > b:
                raise InvariantError(f"weight {x} of cell {c.id!r} lies outside [{a}, {b}]")
            out[c.id] = x
        for c in self.cells:
            for f, _ in c.boundary:
                if out[f] > out[c.id]:
                    raise InvariantError(
                        f"weight is not monotone: face {f!r} ({out[f]}) > cell {c.id!r} ({out[c.id]})"
                    )
        return out

    def __repr__(self):
        return f"WeightedComplex({len(self.cells)} cells, bounds={self.bounds})"


@dataclass(frozen=True)
class FreeModule:
    """The free interval module ``[birth, horizon]`` generated by one cell."""

    generator: CellId
    birth: float
    horizon: float

    @property
    def interval(self) -> Interval:
        return Interval(self.birth, self.horizon)


class GradedDiagramFamily(dict):
    """Mapping ``degree -> Diagram``; missing degrees read as empty diagrams."""

    def __missing__(self, key):
        return Diagram()

    def total(self) -> Diagram:
        out = Diagram()
        for dg in self.values():
            out = out + dg
        return out


def _resolve_weight(K: WeightedComplex, weight) -> dict:
    return K.weight if weight is None else K.check_weight(weight)


def filtration_order(K: WeightedComplex, weight=None, secondary=None) -> list[int]:
    """Indices of cells sorted by weight, then dimension, then id.

    ``secondary`` optionally inserts a second weight right after the first
    key; with two compatible weights this yields a total order refining both.
    """
    w = _resolve_weight(K, weight)
    v = None if secondary is None else K.check_weight(secondary)

    def key(i):
        c = K.cells[i]
        return (w[c.id], v[c.id] if v is not None else 0.0, c.dim, c.id)

    return sorted(range(len(K.cells)), key=key)


def persistence_pairs(K: WeightedComplex, weight=None, order: Sequence[int] | None = None):
    """Birth/death cell pairs of the sublevel filtration over GF(2).

    Returns
    -------
    list of (degree, birth cell id, death cell id or None)
        ``None`` marks an essential class.
    """
    if order is None:
        order = filtration_order(K, weight)
    pos = {K.cells[i].id: k for k, i in enumerate(order)}
    pivots: dict[int, int] = {}
    pairs = []
    paired = set()
    for k, i in enumerate(order):
        c = K.cells[i]
        col = 0
        for f, _ in c.boundary:
            col ^= 1 << pos[f]
        while col:
            low = col.bit_length() - 1
            if low not in pivots:
                break
            col ^= pivots[low]
        if col:
            low = col.bit_length() - 1
            pivots[low] = col
            birth = K.cells[order[low]]
            pairs.append((birth.dim, birth.id, c.id))
            paired.add(birth.id)
            paired.add(c.id)
    for i in order:
        c = K.cells[i]
        if c.id not in paired:
            pairs.append((c.dim, c.id, None))
    return pairs


def _diagrams_from_pairs(K: WeightedComplex, pairs, w: Mapping, horizon: float) -> GradedDiagramFamily:
    out: dict[int, list] = {i: [] for i in range(K.max_dim + 1)}
    for deg, s, t in pairs:
        b = w[s]
        d = horizon if t is None else w[t]
        if b < d:
            out[deg].append((b, d))
    return GradedDiagramFamily({i: Diagram(v) for i, v in out.items()})


def compute_diagrams(K: WeightedComplex, weight=None, horizon: float | None = None, field: str = "GF2") -> GradedDiagramFamily:
    """Persistence diagrams of the sublevel filtration, one per degree.

    Essential classes born at ``w(sigma)`` become ``(w(sigma), horizon)``;
    zero-length bars are dropped.
    """
    if field.upper() not in ("GF2", "GF(2)", "Z2", "Z/2"):
        raise RankstabError(f"unsupported coefficient field {field!r}; only GF(2) is implemented")
    w = _resolve_weight(K, weight)
    horizon = K.horizon if horizon is None else float(horizon)
    if horizon < max(w.values(), default=-math.inf):
        raise RankstabError(f"horizon {horizon} is below the largest weight")
    return _diagrams_from_pairs(K, persistence_pairs(K, w), w, horizon)


def free_modules(K: WeightedComplex, degree: int, weight=None, horizon: float | None = None) -> list[FreeModule]:
    w = _resolve_weight(K, weight)
    horizon = K.horizon if horizon is None else float(horizon)
    return [FreeModule(c.id, w[c.id], horizon) for c in K.cells_of_dim(degree)]


def free_module_diagram(K: WeightedComplex, degree: int, weight=None, horizon: float | None = None) -> Diagram:
    """The chain group in ``degree`` as a diagram of free intervals."""
    return Diagram(fm.interval for fm in free_modules(K, degree, weight, horizon))


def free_module_distance(K, w, v, sigma, m: MetricKind | None = None, horizon: float | None = None) -> float:
    """Distance between the free modules generated by ``sigma`` under ``w`` and ``v``."""
    if sigma not in K.index:
        raise RankstabError(f"unknown cell {sigma!r}")
    m = MetricKind.rank() if m is None else m
    w, v = _resolve_weight(K, w), _resolve_weight(K, v)
    h = K.horizon if horizon is None else float(horizon)
    return distance(Interval(w[sigma], h), Interval(v[sigma], h), m)


def are_compatible(K: WeightedComplex, w, v, tol: float = 1e-12) -> bool:
    """True when no pair of cells is strictly ordered oppositely by ``w`` and ``v``.

    Differences within ``tol`` count as ties (chambers are closed).
    """
    w, v = _resolve_weight(K, w), _resolve_weight(K, v)
    ids = [c.id for c in K.cells]
    # sort by w; any strict v-inversion between cells with strictly
    # increasing w shows up against the running v-maximum of earlier groups
    ordered = sorted(ids, key=lambda c: w[c])
    groups: list[list] = []
    for c in ordered:
        if groups and w[c] - w[groups[-1][0]] <= tol:
            groups[-1].append(c)
        else:
            groups.append([c])
    running_max = -math.inf
    for g in groups:
        if min(v[c] for c in g) < running_max - tol:
            return False
        running_max = max(running_max, max(v[c] for c in g))
    return True


def segment_path(K: WeightedComplex, w0, w1, tol: float = 1e-12) -> list[dict]:
    """Split the segment from ``w0`` to ``w1`` at its crossings of the tie hyperplanes.

    Returns ``[w0, w_{t_1}, ..., w1]`` where ``w_t = (1 - t) w0 + t w1`` and
    the ``t_k`` are the interior parameters at which two cells ordered
    oppositely by ``w0`` and ``w1`` receive equal weight.  Consecutive
    weights are compatible.
    """
    w0, w1 = _resolve_weight(K, w0), _resolve_weight(K, w1)
    ids = [c.id for c in K.cells]
    ts = []
    for i, s in enumerate(ids):
        for u in ids[i + 1:]:
            d0 = w0[s] - w0[u]
            d1 = w1[s] - w1[u]
            if (d0 > 0 and d1 < 0) or (d0 < 0 and d1 > 0):
                t = d0 / (d0 - d1)
                if tol < t < 1 - tol:
                    ts.append(t)
    ts.sort()
    uniq: list[float] = []
    for t in ts:
        if not uniq or t - uniq[-1] > tol:
            uniq.append(t)
    a, b = K.bounds
    path = [dict(w0)]
    for t in uniq:
        path.append({c: min(max((1 - t) * w0[c] + t * w1[c], a), b) for c in ids})
    path.append(dict(w1))
    return path


def _free_module_terms(K: WeightedComplex, w, v, horizon: float, m: MetricKind) -> dict:
    """Per-cell distance between the free modules generated under ``w`` and ``v``."""
    return {c.id: distance(Interval(w[c.id], horizon), Interval(v[c.id], horizon), m) for c in K.cells}


def verify_barcode_stability(K: WeightedComplex, w, v, horizon: float | None = None, tol: float = TOL) -> list[Report]:
    """Check the chain-to-barcode stability inequalities for one pair of weights.

    For each degree ``i`` the 1-Wasserstein distance (rank metric) between
    the degree-``i`` diagrams is compared with the sum, over cells of
    dimension ``i`` and ``i + 1``, of the rank distances between the free
    modules they generate.  A final report compares the graded sum of the
    left-hand sides with the sum over all cells.

    With ``horizon >= 2b - a`` every report must pass.  Smaller horizons are
    accepted so that the failure of the inequality can be exhibited.
    """
    w, v = _resolve_weight(K, w), _resolve_weight(K, v)
    a, b = K.bounds
    horizon = K.horizon if horizon is None else float(horizon)
    if horizon < b:
        raise RankstabError(f"horizon {horizon} is below the upper weight bound {b}")
    m = MetricKind.rank()
    dw = compute_diagrams(K, w, horizon)
    dv = compute_diagrams(K, v, horizon)
    g = _free_module_terms(K, w, v, horizon, m)
    dims = {c.id: c.dim for c in K.cells}
    reports = []
    lhs_total = 0.0
    for i in range(K.max_dim + 1):
        lhs = wasserstein(dw[i], dv[i], m, 1).distance
        rhs = math.fsum(g[c] for c in g if dims[c] in (i, i + 1))
        lhs_total += lhs
        reports.append(Report.check(f"barcode degree {i}", lhs, rhs, tol, f"horizon={format_real(horizon)}"))
    rhs_total = math.fsum(g.values())
    reports.append(Report.check("barcode all degrees", lhs_total, rhs_total, tol, f"horizon={format_real(horizon)}"))
    return reports


def verify_wp_stability(K: WeightedComplex, w, v, p: float, horizon: float | None = None, tol: float = TOL) -> list[Report]:
    """``p``-Wasserstein form of the chain-to-barcode stability inequalities.

    The ground metric is ``d_rank,p`` and the right-hand side is the
    ``p``-norm of ``sigma -> d_rank,p(I_w(sigma), I_v(sigma))`` restricted to
    cells of dimension ``i`` and ``i + 1``.  Besides the per-degree reports,
    two summed reports are produced: ``sum_i W_p`` against the full
    ``p``-norm, and the ``l^p`` aggregate ``(sum_i W_p^p)^(1/p)`` against the
    same norm.  For ``p = 1`` both reduce to the global barcode inequality.
    """
    p = check_order(p, allow_inf=False)
    w, v = _resolve_weight(K, w), _resolve_weight(K, v)
    horizon = K.horizon if horizon is None else float(horizon)
    m = MetricKind.rank(p)
    dw = compute_diagrams(K, w, horizon)
    dv = compute_diagrams(K, v, horizon)
    g = _free_module_terms(K, w, v, horizon, m)
    dims = {c.id: c.dim for c in K.cells}
    reports = []
    lhs_parts = []
    for i in range(K.max_dim + 1):
        lhs = wasserstein(dw[i], dv[i], m, p).distance
        rhs = math.fsum(g[c] ** p for c in g if dims[c] in (i, i + 1)) ** (1 / p)
        lhs_parts.append(lhs)
        reports.append(Report.check(f"W_p degree {i}", lhs, rhs, tol, f"p={format_real(p)}"))
    norm = math.fsum(x**p for x in g.values()) ** (1 / p)
    reports.append(Report.check("W_p summed over degrees", math.fsum(lhs_parts), norm, tol, f"p={format_real(p)}"))
    reports.append(
        Report.check("W_p l^p over degrees", math.fsum(x**p for x in lhs_parts) ** (1 / p), norm, tol, f"p={format_real(p)}")
    )
    return reports


def critical_cell_coupling(K: WeightedComplex, w, v, degree: int, horizon: float | None = None) -> tuple[Coupling, float]:
    """Coupling matching bars of two compatible weights by their critical cells.

    Both diagrams are built from one total order refining ``w`` and ``v``;
    bars are matched when they come from the same birth/death cell pair.
    Returns the coupling and the sum of free-module rank distances over the
    birth and death cells of ``degree``.
    """
    w, v = _resolve_weight(K, w), _resolve_weight(K, v)
    h = K.horizon if horizon is None else float(horizon)
    order = filtration_order(K, w, secondary=v)
    pairs = [pr for pr in persistence_pairs(K, w, order) if pr[0] == degree]
    matched, left, right = [], [], []
    bound = 0.0
    for _, s, t in pairs:
        x = Interval(w[s], h if t is None else w[t])
        y = Interval(v[s], h if t is None else v[t])
        if x.is_diagonal() and y.is_diagonal():
            pass
        elif x.is_diagonal():
            right.append(y)
        elif y.is_diagonal():
            left.append(x)
        else:
            matched.append((x, y))
        bound += distance(Interval(w[s], h), Interval(v[s], h), MetricKind.rank())
        if t is not None:
            bound += distance(Interval(w[t], h), Interval(v[t], h), MetricKind.rank())
    return Coupling(tuple(matched), tuple(left), tuple(right)), bound


# -- independent rank oracle --------------------------------------------------


def _gf2_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for vec in vectors:
        while vec:
            hb = vec.bit_length() - 1
            if hb not in basis:
                basis[hb] = vec
                break
            vec ^= basis[hb]
    return len(basis)


def _gf2_kernel(columns: list[int], n_cols: int) -> list[int]:
    """Basis of the kernel of the matrix whose ``j``-th column is ``columns[j]``.

    Kernel vectors are bitmasks over column indices.
    """
    # eliminate while tracking combinations of the original columns
    basis: dict[int, tuple[int, int]] = {}
    kernel = []
    for j in range(n_cols):
        vec, combo = columns[j], 1 << j
        while vec:
            hb = vec.bit_length() - 1
            if hb not in basis:
                basis[hb] = (vec, combo)
                break
            bv, bc = basis[hb]
            vec ^= bv
            combo ^= bc
        if not vec:
            kernel.append(combo)
    return kernel


def homology_rank(K: WeightedComplex, degree: int, r: float, s: float, weight=None) -> int:
    """Rank of ``H_degree(K_r) -> H_degree(K_s)`` for sublevel sets, over GF(2).

    Computed by linear algebra on cycles and boundaries, without the
    persistence reduction: the rank is ``dim(Z_r + B_s) - dim(B_s)``.
    """
    if r > s:
        raise RankstabError("need r <= s")
    w = _resolve_weight(K, weight)
    cells_i = [c for c in K.cells if c.dim == degree]
    col = {c.id: k for k, c in enumerate(cells_i)}
    # cycles of K_r in degree i, written in the basis of all i-cells
    live_i = [c for c in cells_i if w[c.id] <= r]
    faces = {c.id: k for k, c in enumerate(x for x in K.cells if x.dim == degree - 1)}
    columns = []
    for c in live_i:
        vec = 0
        for f, _ in c.boundary:
            vec ^= 1 << faces[f]
        columns.append(vec)
    z_r = []
    for combo in _gf2_kernel(columns, len(columns)):
        vec = 0
        for k, c in enumerate(live_i):
            if combo >> k & 1:
                vec ^= 1 << col[c.id]
        z_r.append(vec)
    b_s = []
    for c in K.cells:
        if c.dim == degree + 1 and w[c.id] <= s:
            vec = 0
            for f, _ in c.boundary:
                vec ^= 1 << col[f]
            b_s.append(vec)
    return _gf2_rank(z_r + b_s) - _gf2_rank(b_s)


# -- text format ----------------------------------------------------------------


def _parse_number(tok: str, where: str) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(f"{where}: malformed number {tok!r}") from None
    if not math.isfinite(x):
        raise ParseError(f"{where}: non-finite number {tok!r}")
    return x


def parse_complex(text: str, source: str = "<string>") -> WeightedComplex:
    """Parse the complex format.

    The first non-comment line holds the bounds ``a b``; each following line
    is ``id dim weight [boundary ids...]``.  ``#`` starts a comment.
    """
    bounds = None
    cells, weight = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        toks = line.split()
        if bounds is None:
            if len(toks) != 2:
                raise ParseError(f"{where}: expected header 'a b', got {raw!r}")
            bounds = (_parse_number(toks[0], where), _parse_number(toks[1], where))
            continue
        if len(toks) < 3:
            raise ParseError(f"{where}: expected 'id dim weight [faces...]', got {raw!r}")
        cid = toks[0]
        try:
            dim = int(toks[1])
        except ValueError:
            raise ParseError(f"{where}: malformed dimension {toks[1]!r}") from None
        if cid in weight:
            raise ParseError(f"{where}: duplicate cell id {cid!r}")
        weight[cid] = _parse_number(toks[2], where)
        cells.append((cid, dim, tuple(toks[3:])))
    if bounds is None:
        raise ParseError(f"{source}: missing header line 'a b'")
    return WeightedComplex(cells, weight, bounds)


def parse_weights(text: str, source: str = "<string>") -> dict:
    """Parse ``id value`` lines into a weight mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        where = f"{source}:{lineno}"
        if len(toks) != 2:
            raise ParseError(f"{where}: expected 'id value', got {raw!r}")
        if toks[0] in out:
            raise ParseError(f"{where}: duplicate cell id {toks[0]!r}")
        out[toks[0]] = _parse_number(toks[1], where)
    return out


def format_complex(K: WeightedComplex) -> str:
    a, b = K.bounds
    lines = [f"{format_real(a)} {format_real(b)}"]
    for c in K.cells:
        faces = " ".join(str(f) for f, _ in c.boundary)
        lines.append(f"{c.id} {c.dim} {format_real(K.weight[c.id])}" + (f" {faces}" if faces else ""))
    return "\n".join(lines) + "\n"


def format_weights(K: WeightedComplex, weight: Mapping) -> str:
    return "".join(f"{c.id} {format_real(weight[c.id])}\n" for c in K.cells)


def _read(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def read_complex(path: str | os.PathLike) -> WeightedComplex:
    return parse_complex(_read(path), str(path))


def read_weights(path: str | os.PathLike) -> dict:
    return parse_weights(_read(path), str(path))
