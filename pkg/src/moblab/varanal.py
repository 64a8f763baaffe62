"""Exact polyhedral variational analysis in small ambient dimension.

Everything here runs in rational arithmetic: convex polyhedra with
inequality representations, polyhedral cones with generator/inequality
duality, limiting (Mordukhovich) normal cones of finite unions of convex
polyhedra via a cell decomposition of the active-constraint arrangement,
coderivative slices, exact union-inclusion checks, and the checkers for the
frontier-map coderivative estimates on the worked-example catalog.

A float Monte-Carlo proximal-normal oracle (seeded, vectorized) is included
purely to validate the exact cell-method output.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cones import (ConeError, canonical_ray, cone_dual_generators,
                    cone_generators_from_inequalities)
from .simplex import solve_lp

__all__ = [
    "VaranalError", "ConvexPolyhedron", "PolyUnion", "PolyCone", "ConeUnion",
    "SliceUnion", "normal_cone_convex", "limiting_normal_cone_union",
    "proximal_normal_oracle", "coderivative_slice", "inclusion_check",
    "estimate_check", "EstimateReport",
]


class VaranalError(ValueError):
    pass


def _fr(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _frvec(v) -> tuple[Fraction, ...]:
    return tuple(_fr(t) for t in v)


# ---------------------------------------------------------------------------
# convex polyhedra (H-representation)
# ---------------------------------------------------------------------------

@dataclass
class ConvexPolyhedron:
    """{u : rows[i] . u <= rhs[i]} with exact rational data."""

    dim: int
    rows: tuple
    rhs: tuple
    _empty: bool | None = field(default=None, repr=False)

    def __init__(self, dim: int, rows: Iterable[Sequence], rhs: Iterable):
        self.dim = dim
        self.rows = tuple(_frvec(r) for r in rows)
        self.rhs = tuple(_fr(b) for b in rhs)
        if any(len(r) != dim for r in self.rows):
            raise VaranalError("row dimension mismatch")
        if len(self.rows) != len(self.rhs):
            raise VaranalError("one rhs per row is required")
        self._empty = None

    # -- basic queries -----------------------------------------------------

    def is_empty(self) -> bool:
        if self._empty is None:
            res = solve_lp([Fraction(0)] * self.dim, list(self.rows),
                           ["<="] * len(self.rows), list(self.rhs),
                           [False] * self.dim)
            self._empty = res.status == "infeasible"
        return self._empty

    def contains(self, u: Sequence) -> bool:
        ue = _frvec(u)
        return all(sum(a * t for a, t in zip(row, ue)) <= b
                   for row, b in zip(self.rows, self.rhs))

    def active_set(self, u: Sequence) -> list[int]:
        ue = _frvec(u)
        if not self.contains(ue):
            raise VaranalError(f"point {u!r} is not in the polyhedron")
        return [i for i, (row, b) in enumerate(zip(self.rows, self.rhs))
                if sum(a * t for a, t in zip(row, ue)) == b]

    def linear_max(self, a: Sequence) -> Fraction | None:
        """sup over the polyhedron of <a, u>; None when unbounded above."""
        ae = _frvec(a)
        res = solve_lp([-t for t in ae], list(self.rows), ["<="] * len(self.rows),
                       list(self.rhs), [False] * self.dim)
        if res.status == "unbounded":
            return None
        if res.status == "infeasible":
            raise VaranalError("linear_max of an empty polyhedron")
        return -res.value

    def linear_min(self, a: Sequence) -> Fraction | None:
        mx = self.linear_max([-t for t in _frvec(a)])
        return None if mx is None else -mx

    def with_row(self, a: Sequence, b) -> "ConvexPolyhedron":
        return ConvexPolyhedron(self.dim, list(self.rows) + [list(a)],
                                list(self.rhs) + [b])

    def rel_int_point(self) -> tuple[Fraction, ...]:
        """Exact point in the relative interior (implicit-equality rows are
        detected by their maximal slack)."""
        if self.is_empty():
            raise VaranalError("empty polyhedron has no relative interior")
        implicit = []
        for i, (row, b) in enumerate(zip(self.rows, self.rhs)):
            mx = self.linear_max(row)
            if mx is not None and mx == b:
                mn = self.linear_min(row)
                if mn == b:
                    implicit.append(i)
        nrows, nrhs, senses = [], [], []
        for i, (row, b) in enumerate(zip(self.rows, self.rhs)):
            if i in implicit:
                nrows.append(list(row) + [Fraction(0)])
                senses.append("<=")
            else:
                nrows.append(list(row) + [Fraction(1)])
                senses.append("<=")
            nrhs.append(b)
        nrows.append([Fraction(0)] * self.dim + [Fraction(1)])
        nrhs.append(Fraction(1))
        senses.append("<=")
        c = [Fraction(0)] * self.dim + [Fraction(-1)]
        res = solve_lp(c, nrows, senses, nrhs, [False] * (self.dim + 1))
        if res.status != "optimal":
            raise VaranalError("relative-interior LP failed")
        return tuple(res.x[:self.dim])

    # -- V-representation (desk-scale, dim <= 3 contract) --------------------

    def vertices(self) -> list[tuple[Fraction, ...]]:
        from .simplex import gauss_solve, nullspace
        out = set()
        m = len(self.rows)
        for subset in itertools.combinations(range(m), self.dim):
            sub = [list(self.rows[i]) for i in subset]
            if len(nullspace(sub)) != 0:
                continue
            sol = gauss_solve(sub, [self.rhs[i] for i in subset])
            if sol is not None and self.contains(sol):
                out.add(tuple(sol))
        return sorted(out)

    def recession_rays(self) -> list[tuple[Fraction, ...]]:
        return [g for g in cone_generators_from_inequalities(
            [[-a for a in row] for row in self.rows], self.dim)]

    def translated(self, t: Sequence) -> "ConvexPolyhedron":
        te = _frvec(t)
        return ConvexPolyhedron(
            self.dim, list(self.rows),
            [b + sum(a * ti for a, ti in zip(row, te))
             for row, b in zip(self.rows, self.rhs)])

    def __repr__(self):
        return f"ConvexPolyhedron(dim={self.dim}, rows={len(self.rows)})"


@dataclass
class PolyUnion:
    """Finite union of convex polyhedra in a common ambient dimension."""

    pieces: list[ConvexPolyhedron]
    label: str = ""

    def __post_init__(self):
        if not self.pieces:
            raise VaranalError("a union needs at least one piece")
        dims = {p.dim for p in self.pieces}
        if len(dims) != 1:
            raise VaranalError("pieces must share one ambient dimension")
        for p in self.pieces:
            if p.is_empty():
                raise VaranalError("union pieces must be nonempty")

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def contains(self, u) -> bool:
        return any(p.contains(u) for p in self.pieces)


# ---------------------------------------------------------------------------
# polyhedral cones and cone unions
# ---------------------------------------------------------------------------

class PolyCone:
    """Polyhedral (not necessarily pointed) cone with canonical generators
    and a cached inequality representation."""

    def __init__(self, dim: int, generators: Iterable[Sequence] | None = None,
                 inequalities: Iterable[Sequence] | None = None):
        self.dim = dim
        if (generators is None) == (inequalities is None):
            raise VaranalError("give exactly one of generators/inequalities")
        if inequalities is not None:
            self.generators = tuple(cone_generators_from_inequalities(
                list(inequalities), dim))
            self._ineq = tuple(_frvec(h) for h in inequalities)
        else:
            gens = [canonical_ray(_frvec(g)) for g in generators
                    if any(t != 0 for t in _frvec(g))]
            # canonicalize through the double description round trip
            ineq = cone_dual_generators(gens, dim) if gens else \
                [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)] + \
                [tuple(Fraction(-int(i == j)) for j in range(dim)) for i in range(dim)]
            self.generators = tuple(cone_generators_from_inequalities(ineq, dim)) \
                if gens else ()
            self._ineq = tuple(ineq)

    @property
    def inequalities(self) -> tuple:
        return self._ineq

    def contains(self, v: Sequence) -> bool:
        ve = _frvec(v)
        return all(sum(h * t for h, t in zip(row, ve)) >= 0 for row in self._ineq)

    def intersection(self, other: "PolyCone") -> "PolyCone":
        return PolyCone(self.dim,
                        inequalities=list(self._ineq) + list(other.inequalities))

    def is_zero(self) -> bool:
        return not self.generators

    def is_line(self) -> bool:
        if len(self.generators) != 2:
            return False
        a, b = self.generators
        return tuple(-t for t in a) == b

    def as_polyhedron(self) -> ConvexPolyhedron:
        return ConvexPolyhedron(self.dim, [[-h for h in row] for row in self._ineq],
                                [Fraction(0)] * len(self._ineq))

    def key(self):
        return tuple(sorted(self.generators))

    def __eq__(self, other):
        return isinstance(other, PolyCone) and self.dim == other.dim and \
            self.key() == other.key()

    def __hash__(self):
        return hash((self.dim, self.key()))

    def __repr__(self):
        return f"PolyCone({[tuple(map(str, g)) for g in self.generators]})"


@dataclass
class ConeUnion:
    """Finite (generally nonconvex) union of polyhedral cones."""

    dim: int
    pieces: list[PolyCone]

    def contains(self, v) -> bool:
        return any(p.contains(v) for p in self.pieces)

    def canonical(self) -> "ConeUnion":
        """Split a pure line into opposite rays when a ray is absorbed by
        another piece, drop duplicates, then drop every piece whose
        generators all lie in another piece."""
        work: list[PolyCone] = []
        for p in self.pieces:
            if p.is_line():
                # pieces that are themselves inside the line cannot justify
                # splitting it (they are absorbed by the line instead)
                others = [q for q in self.pieces if q is not p and
                          not all(p.contains(g) for g in q.generators)]
                if any(q.contains(g) for q in others for g in p.generators):
                    work.extend(PolyCone(self.dim, generators=[g])
                                for g in p.generators)
                else:
                    work.append(p)
            else:
                work.append(p)
        uniq: list[PolyCone] = []
        for p in work:
            if p not in uniq:
                uniq.append(p)
        if len(uniq) > 1:
            uniq = [p for p in uniq if not p.is_zero()] or uniq[:1]
        # after deduplication the absorption relation is antisymmetric, so
        # keeping exactly the maximal pieces is well defined
        kept = [p for p in uniq
                if not any(q is not p and all(q.contains(g) for g in p.generators)
                           for q in uniq)]
        kept.sort(key=lambda p: p.key())
        return ConeUnion(self.dim, kept)

    def to_json(self) -> dict:
        return {"ambient": self.dim,
                "pieces": [[[_num(t) for t in g] for g in p.generators]
                           for p in self.pieces]}

    @classmethod
    def from_json(cls, data) -> "ConeUnion":
        if isinstance(data, str):
            data = json.loads(data)
        dim = int(data["ambient"])
        return cls(dim, [PolyCone(dim, generators=piece)
                         for piece in data["pieces"]])

    def set_equals(self, other: "ConeUnion") -> bool:
        a, b = inclusion_check(self, other)
        if not a:
            return False
        c, d = inclusion_check(other, self)
        return c


def _num(t: Fraction):
    return int(t) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


# ---------------------------------------------------------------------------
# normal cones
# ---------------------------------------------------------------------------

def normal_cone_convex(poly: ConvexPolyhedron, u: Sequence) -> PolyCone:
    """Classical normal cone of a convex polyhedron: the conic hull of the
    outward normals of the constraints active at the point."""
    act = poly.active_set(u)
    gens = [list(poly.rows[i]) for i in act]
    if not gens:
        return PolyCone(poly.dim, generators=[])
    return PolyCone(poly.dim, generators=gens)


def _active_rows_at(piece: ConvexPolyhedron, xbar) -> list[tuple]:
    xe = _frvec(xbar)
    return [tuple(row) for row, b in zip(piece.rows, piece.rhs)
            if sum(a * t for a, t in zip(row, xe)) == b]


def _sign_feasible(eqs, negs, poss, dim) -> bool:
    """Strict/equality direction system: a.w == 0 / <= -1 / >= 1."""
    rows, senses, rhs = [], [], []
    for a in eqs:
        rows.append(list(a)); senses.append("=="); rhs.append(Fraction(0))
    for a in negs:
        rows.append(list(a)); senses.append("<="); rhs.append(Fraction(-1))
    for a in poss:
        rows.append(list(a)); senses.append(">="); rhs.append(Fraction(1))
    if not rows:
        return True
    res = solve_lp([Fraction(0)] * dim, rows, senses, rhs, [False] * dim)
    return res.status == "optimal"


def limiting_normal_cone_union(union: PolyUnion, xbar) -> ConeUnion:
    """Limiting normal cone of a finite union of convex polyhedra at xbar.

    Cell method: near xbar each piece is described by its rows active at
    xbar; directions w are classified by the sign vector of those rows, each
    realizable sign vector is a cell of the central arrangement, the pieces
    containing a cell are those whose rows are all <= 0 on it, and the cell's
    contribution is the intersection of the active-normal cones of exactly
    those pieces.  The union of the contributions over all cells contained in
    the set, canonicalized, is the limiting normal cone.
    """
    xe = _frvec(xbar)
    holders = [p for p in union.pieces if p.contains(xe)]
    if not holders:
        raise VaranalError(f"point {xbar!r} is not in the union")
    dim = union.dim
    piece_rows = [_active_rows_at(p, xe) for p in holders]
    flat: list[tuple[int, tuple]] = []
    for i, rows in enumerate(piece_rows):
        for a in rows:
            flat.append((i, a))

    contributions: list[PolyCone] = []
    seen: set = set()

    def leaf(signs: list[int]) -> None:
        containing = []
        for i in range(len(holders)):
            ok = all(signs[k] <= 0 for k, (pi, _) in enumerate(flat) if pi == i)
            if ok:
                containing.append(i)
        if not containing:
            return
        cone = None
        for i in containing:
            gens = [list(flat[k][1]) for k in range(len(flat))
                    if flat[k][0] == i and signs[k] == 0]
            c = PolyCone(dim, generators=gens)
            cone = c if cone is None else cone.intersection(c)
        if cone.key() not in seen:
            seen.add(cone.key())
            contributions.append(cone)

    def dfs(k: int, signs: list[int]) -> None:
        if k == len(flat):
            leaf(signs)
            return
        a = flat[k][1]
        for s in (0, -1, 1):
            eqs = [flat[j][1] for j in range(k) if signs[j] == 0]
            negs = [flat[j][1] for j in range(k) if signs[j] == -1]
            poss = [flat[j][1] for j in range(k) if signs[j] == 1]
            (eqs if s == 0 else negs if s == -1 else poss).append(a)
            if _sign_feasible(eqs, negs, poss, dim):
                dfs(k + 1, signs + [s])

    dfs(0, [])
    return ConeUnion(dim, contributions).canonical()


# ---------------------------------------------------------------------------
# proximal-normal Monte-Carlo oracle (float; validation only)
# ---------------------------------------------------------------------------

def proximal_normal_oracle(union: PolyUnion, xbar, samples: int = 10000,
                           radius: float = 0.25, seed: int = 0,
                           hint_directions: Sequence[Sequence[float]] | None = None
                           ) -> np.ndarray:
    """Sample proximal normal directions: draw points near xbar, project them
    onto the union (face enumeration per convex piece, vectorized in float),
    and emit the normalized difference directions.

    Deterministic for fixed seed.  ``hint_directions`` adds stratified draws
    along the given directions (still genuine projections)."""
    dim = union.dim
    x0 = np.asarray([float(t) for t in xbar])
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(samples, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(samples, 1)) ** (1.0 / dim)
    pts = x0 + pts * radii
    if hint_directions is not None and len(hint_directions):
        extra = []
        per = max(1, samples // (4 * len(hint_directions)))
        for hd in hint_directions:
            d = np.asarray([float(t) for t in hd])
            nd = np.linalg.norm(d)
            if nd == 0:
                continue
            d = d / nd
            jitter = rng.normal(scale=0.03, size=(per, dim))
            scales = radius * rng.uniform(0.05, 1.0, size=(per, 1))
            extra.append(x0 + scales * (d + jitter))
        pts = np.vstack([pts] + extra)

    best_d2 = np.full(len(pts), np.inf)
    best_proj = np.zeros_like(pts)
    for piece in union.pieces:
        a = np.asarray([[float(t) for t in row] for row in piece.rows])
        b = np.asarray([float(t) for t in piece.rhs])
        m = len(b)
        for r in range(0, m + 1):
            for subset in itertools.combinations(range(m), r):
                if subset:
                    ai = a[list(subset)]
                    bi = b[list(subset)]
                    pinv = np.linalg.pinv(ai)
                    proj = pts - (pts @ ai.T - bi) @ pinv.T
                    # discard faces whose affine system the projection fails
                    ok = np.abs(proj @ ai.T - bi).max(axis=1) <= 1e-9
                else:
                    proj = pts.copy()
                    ok = np.ones(len(pts), dtype=bool)
                feas = (proj @ a.T <= b + 1e-9).all(axis=1) & ok
                d2 = ((pts - proj) ** 2).sum(axis=1)
                upd = feas & (d2 < best_d2 - 1e-15)
                best_d2[upd] = d2[upd]
                best_proj[upd] = proj[upd]
    diff = pts - best_proj
    norms = np.linalg.norm(diff, axis=1)
    keep = norms > 1e-9
    return diff[keep] / norms[keep, None]


# ---------------------------------------------------------------------------
# coderivative slices
# ---------------------------------------------------------------------------

@dataclass
class SliceUnion:
    """Union of convex polyhedra used for coderivative values D*(.)(z*)."""

    dim: int
    pieces: list[ConvexPolyhedron]

    def nonempty_pieces(self) -> list[ConvexPolyhedron]:
        return [p for p in self.pieces if not p.is_empty()]

    def is_empty(self) -> bool:
        return not self.nonempty_pieces()

    def contains(self, u) -> bool:
        return any(p.contains(u) for p in self.pieces)

    def translated(self, t) -> "SliceUnion":
        return SliceUnion(self.dim, [p.translated(t) for p in self.pieces])

    def union(self, other: "SliceUnion") -> "SliceUnion":
        return SliceUnion(self.dim, self.pieces + other.pieces)

    # -- canonical 1-D description -----------------------------------------

    def intervals(self) -> list[tuple]:
        """Merged closed intervals (lo, hi) with None for unbounded ends;
        only for dim 1."""
        if self.dim != 1:
            raise VaranalError("interval form requires a one-dimensional slice")
        ivs: list[list] = []
        for p in self.nonempty_pieces():
            lo, hi = None, None
            for (a,), b in zip(p.rows, p.rhs):
                if a > 0:
                    v = b / a
                    hi = v if hi is None else min(hi, v)
                elif a < 0:
                    v = b / a
                    lo = v if lo is None else max(lo, v)
            ivs.append([lo, hi])
        changed = True
        while changed:
            changed = False
            out: list[list] = []
            for iv in ivs:
                for ov in out:
                    if _iv_overlap(ov, iv):
                        ov[0] = None if ov[0] is None or iv[0] is None else min(ov[0], iv[0])
                        ov[1] = None if ov[1] is None or iv[1] is None else max(ov[1], iv[1])
                        changed = True
                        break
                else:
                    out.append(list(iv))
            ivs = out
        ivs.sort(key=lambda t: (t[0] is not None, t[0] if t[0] is not None else 0))
        return [tuple(t) for t in ivs]

    def describe(self) -> str:
        if self.is_empty():
            return "empty"
        if self.dim == 1:
            parts = []
            for lo, hi in self.intervals():
                if lo is None and hi is None:
                    parts.append("R")
                elif lo is None:
                    parts.append(f"(-inf, {hi}]")
                elif hi is None:
                    parts.append(f"[{lo}, inf)")
                elif lo == hi:
                    parts.append(f"{{{lo}}}")
                else:
                    parts.append(f"[{lo}, {hi}]")
            return " u ".join(parts)
        return f"union of {len(self.nonempty_pieces())} polyhedra in R^{self.dim}"

    def equals_point(self, pt) -> bool:
        ok, _ = inclusion_check(self, SliceUnion.from_point(self.dim, pt))
        return ok and self.contains(pt)

    @classmethod
    def from_point(cls, dim, pt) -> "SliceUnion":
        pe = _frvec(pt)
        rows, rhs = [], []
        for j in range(dim):
            e = [Fraction(0)] * dim
            e[j] = Fraction(1)
            rows.append(list(e)); rhs.append(pe[j])
            rows.append([-t for t in e]); rhs.append(-pe[j])
        return cls(dim, [ConvexPolyhedron(dim, rows, rhs)])

    @classmethod
    def halfline(cls, dim: int, nonneg: bool = True) -> "SliceUnion":
        if dim != 1:
            raise VaranalError("halfline helper is one-dimensional")
        row = [[Fraction(-1) if nonneg else Fraction(1)]]
        return cls(1, [ConvexPolyhedron(1, row, [Fraction(0)])])

    def set_equals(self, other: "SliceUnion") -> bool:
        a, _ = inclusion_check(self, other)
        if not a:
            return False
        b, _ = inclusion_check(other, self)
        return b


def _iv_overlap(a, b) -> bool:
    alo, ahi = a
    blo, bhi = b
    lo_ok = blo is None or ahi is None or blo <= ahi
    hi_ok = alo is None or bhi is None or alo <= bhi
    return lo_ok and hi_ok


def coderivative_slice(cone_union: ConeUnion, z_star: Sequence, n_x: int
                       ) -> SliceUnion:
    """{x* : (x*, -z*) in N} for a cone union N over (parameter x image)
    space; exact union of polyhedra in x*-space, emptiness certified by LP."""
    zs = _frvec(z_star)
    if any(len(h) != n_x + len(zs) for p in cone_union.pieces
           for h in p.inequalities):
        raise VaranalError("ambient dimension must equal dim x + dim z")
    pieces = []
    for p in cone_union.pieces:
        rows, rhs = [], []
        for h in p.inequalities:
            hx, hz = h[:n_x], h[n_x:]
            # h.(x*, -z*) >= 0  <=>  -hx.x* <= -hz.z*
            rows.append([-t for t in hx])
            rhs.append(-sum(a * b for a, b in zip(hz, zs)))
        pieces.append(ConvexPolyhedron(n_x, rows, rhs))
    return SliceUnion(n_x, [p for p in pieces if not p.is_empty()])


# ---------------------------------------------------------------------------
# exact inclusion of unions
# ---------------------------------------------------------------------------

def _as_poly_pieces(obj) -> tuple[int, list[ConvexPolyhedron]]:
    if isinstance(obj, ConeUnion):
        return obj.dim, [p.as_polyhedron() for p in obj.pieces]
    if isinstance(obj, SliceUnion):
        return obj.dim, list(obj.pieces)
    if isinstance(obj, PolyUnion):
        return obj.dim, list(obj.pieces)
    raise VaranalError(f"cannot interpret {type(obj).__name__} as a union")


def _piece_subset(p: ConvexPolyhedron, q: ConvexPolyhedron) -> bool:
    for row, b in zip(q.rows, q.rhs):
        mx = p.linear_max(row)
        if mx is None or mx > b:
            return False
    return True


def inclusion_check(a, b):
    """Exact test of A subset-of B for unions of polyhedra / cones.

    Returns (holds, witness).  Fast path: a piece whose generators (cones) or
    whole body fit inside a single piece of B.  Otherwise pieces of A are
    split along the hyperplanes of B's pieces until each fragment either fits
    in one B-piece or yields an exact witness point outside B.
    """
    dim_a, pa = _as_poly_pieces(a)
    dim_b, pb = _as_poly_pieces(b)
    if dim_a != dim_b:
        raise VaranalError("ambient dimension mismatch")
    if isinstance(a, ConeUnion):
        # quick witness: a generator of A outside B entirely
        for p in a.pieces:
            for g in p.generators:
                if not any(q.contains(g) for q in b.pieces):
                    return False, tuple(g)
    pb = [q for q in pb if not q.is_empty()]
    stack = [p for p in pa if not p.is_empty()]
    guard = 0
    while stack:
        guard += 1
        if guard > 10000:
            raise VaranalError("inclusion splitting did not terminate")
        p = stack.pop()
        if any(_piece_subset(p, q) for q in pb):
            continue
        cut = None
        for q in pb:
            for row, brhs in zip(q.rows, q.rhs):
                mx = p.linear_max(row)
                mn = p.linear_min(row)
                if (mx is None or mx > brhs) and (mn is None or mn < brhs):
                    cut = (row, brhs)
                    break
            if cut:
                break
        if cut is None:
            return False, p.rel_int_point()
        row, brhs = cut
        lo = p.with_row(row, brhs)
        hi = p.with_row([-t for t in row], -brhs)
        for part in (lo, hi):
            if not part.is_empty():
                stack.append(part)
    return True, None


# ---------------------------------------------------------------------------
# estimate battery on catalog models
# ---------------------------------------------------------------------------

@dataclass
class EstimateReport:
    which: str
    catalog_id: str
    reference: tuple
    z_star: tuple
    z_star_in_strict_dual: bool
    holds: bool
    witness: tuple | None
    lhs: str
    rhs: str


def _matvec_t(mat, v):
    """mat^T v for a matrix given as a list of rows (Fractions)."""
    rows = [_frvec(r) for r in mat]
    ncols = len(rows[0]) if rows else 0
    ve = _frvec(v)
    return tuple(sum(rows[i][j] * ve[i] for i in range(len(rows)))
                 for j in range(ncols))


def estimate_check(catalog_id: str, reference_point, z_star, which: str
                   ) -> EstimateReport:
    """Check one of the frontier-map coderivative estimates on a catalog
    entry with exact local polyhedral models.

    which = 'falsified_4_3'     : D*Phi(z*)   vs D*Sigma(z*)
            'weak_frontier_4_2' : D*Phi_w(z*) vs D*(Sigma+C)(z*)
            'thm_4_4'           : D*Phi_w(z*) vs f'_x^T z* + D*Gamma(f'_y^T z*)
            'lemma_4_6'         : D*Phi_w(z*) vs f'_x^T z* + D*Psi_w(f'_y^T z*)
    """
    from .catalog import varanal_models
    models = varanal_models(catalog_id)
    if models is None:
        raise VaranalError(f"catalog entry {catalog_id!r} has no exact local "
                           "polyhedral models")
    zs = _frvec(z_star)
    n_x = models.n
    strict = models.cone.strict_dual_contains(zs)
    ref = tuple(reference_point)

    def ncu(name: str) -> ConeUnion:
        pu, point = models.unions[name]
        return limiting_normal_cone_union(pu, point)

    if which == "falsified_4_3":
        lhs = coderivative_slice(ncu("phi"), zs, n_x)
        rhs = coderivative_slice(ncu("sigma"), zs, n_x)
    elif which == "weak_frontier_4_2":
        lhs = coderivative_slice(ncu("phi_w"), zs, n_x)
        rhs = coderivative_slice(ncu("sigma_plus_C"), zs, n_x)
    elif which in ("thm_4_4", "lemma_4_6"):
        lhs = coderivative_slice(ncu("phi_w"), zs, n_x)
        graph = "gamma" if which == "thm_4_4" else "psi_w"
        rhs = None
        for ybar in models.psi_w_fiber:
            fx = models.jac_fx(ref, ybar)
            fy = models.jac_fy(ref, ybar)
            shift = _matvec_t(fx, zs)
            ystar = _matvec_t(fy, zs)
            pu, point = models.unions[graph]
            n_graph = limiting_normal_cone_union(pu, point)
            part = coderivative_slice(n_graph, ystar, n_x).translated(shift)
            rhs = part if rhs is None else rhs.union(part)
    else:
        raise VaranalError(f"unknown estimate {which!r}")

    holds, witness = inclusion_check(lhs, rhs)
    return EstimateReport(
        which=which, catalog_id=catalog_id, reference=ref,
        z_star=tuple(zs), z_star_in_strict_dual=strict, holds=holds,
        witness=None if witness is None else tuple(witness),
        lhs=lhs.describe(), rhs=rhs.describe())
