"""Polyhedral ordering cones: membership, duals, strict duals, sphere grids.

An ordering cone here is a finitely generated, pointed, closed convex cone
with nonempty interior.  Generators are exact rationals; the inequality
representation (generators of the dual cone) is derived once and cached, so
membership queries are plain inner-product sign tests.

The module-level helpers (`cone_generators_from_inequalities`,
`cone_dual_generators`, `canonical_ray`) work for arbitrary polyhedral cones
in small ambient dimension, including non-pointed ones, and are shared with
the variational-analysis machinery.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .simplex import gauss_solve, nullspace, solve_lp

__all__ = [
    "OrderingCone",
    "ConeError",
    "canonical_ray",
    "cone_generators_from_inequalities",
    "cone_dual_generators",
    "cone_contains_exact",
]


class ConeError(ValueError):
    """Invalid cone data or query."""


def _frac_vec(v) -> tuple[Fraction, ...]:
    out = []
    for t in v:
        if isinstance(t, str):
            out.append(Fraction(t))
        elif isinstance(t, float):
            out.append(Fraction(t))
        else:
            out.append(Fraction(t))
    return tuple(out)


def canonical_ray(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a nonzero rational vector by a positive factor to the primitive
    integer form (gcd 1).  Direction is preserved; only the scale changes."""
    denom = 1
    for t in v:
        denom = denom * t.denominator // math.gcd(denom, t.denominator)
    ints = [int(t * denom) for t in v]
    g = 0
    for t in ints:
        g = math.gcd(g, abs(t))
    if g == 0:
        raise ConeError("zero vector has no ray direction")
    return tuple(Fraction(t // g) for t in ints)


def _extreme_rays_pointed(g_rows: list[list[Fraction]], dim: int) -> list[tuple[Fraction, ...]]:
    """Extreme rays of the pointed cone {u : G u >= 0} (G's null space must be
    trivial).  Subset enumeration; fine for desk-scale row counts."""
    if dim == 0:
        return []
    if dim == 1:
        if all(r[0] >= 0 for r in g_rows):
            return [(Fraction(1),)]
        if all(r[0] <= 0 for r in g_rows):
            return [(Fraction(-1),)]
        return []
    rays: set[tuple[Fraction, ...]] = set()
    m = len(g_rows)
    for subset in itertools.combinations(range(m), dim - 1):
        ker = nullspace([g_rows[i] for i in subset])
        if len(ker) != 1:
            continue
        r = ker[0]
        vals = [sum(gi * ri for gi, ri in zip(row, r)) for row in g_rows]
        if all(v >= 0 for v in vals):
            cand = r
        elif all(v <= 0 for v in vals):
            cand = [-t for t in r]
        else:
            continue
        tight = [g_rows[i] for i in range(m)
                 if sum(gi * ci for gi, ci in zip(g_rows[i], cand)) == 0]
        # extremality: tight rows must pin the direction down to a line
        if len(nullspace(tight)) == 1 if tight else dim == 1:
            rays.add(canonical_ray(cand))
    return sorted(rays)


def cone_generators_from_inequalities(rows: Iterable[Sequence], dim: int
                                      ) -> list[tuple[Fraction, ...]]:
    """Generators (lineality basis in +/- pairs plus extreme rays) of the
    polyhedral cone {v in R^dim : row . v >= 0 for all rows}."""
    g = [list(_frac_vec(r)) for r in rows]
    if not g:
        basis = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        out = []
        for b in basis:
            out.append(canonical_ray(b))
            out.append(canonical_ray([-t for t in b]))
        return sorted(set(out))
    lin = nullspace(g)
    gens: set[tuple[Fraction, ...]] = set()
    for b in lin:
        gens.add(canonical_ray(b))
        gens.add(canonical_ray([-t for t in b]))
    # orthogonal complement of the lineality space
    if lin:
        comp = nullspace(lin)
    else:
        comp = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    d2 = len(comp)
    if d2:
        proj_rows = [[sum(ri * wi for ri, wi in zip(row, w)) for w in comp] for row in g]
        for u in _extreme_rays_pointed(proj_rows, d2):
            v = [sum(ui * w[j] for ui, w in zip(u, comp)) for j in range(dim)]
            gens.add(canonical_ray(v))
    return sorted(gens)


def cone_dual_generators(generators: Iterable[Sequence], dim: int
                         ) -> list[tuple[Fraction, ...]]:
    """Generators of the dual cone {w : <g, w> >= 0 for all generators g}."""
    return cone_generators_from_inequalities(generators, dim)


def cone_contains_exact(generators: Sequence[Sequence[Fraction]], dim: int,
                        v: Sequence[Fraction]) -> bool:
    """Exact membership of v in cone(generators), via LP feasibility."""
    gl = [list(_frac_vec(g)) for g in generators]
    if not gl:
        return all(t == 0 for t in _frac_vec(v))
    rows = [[g[i] for g in gl] for i in range(dim)]
    res = solve_lp([Fraction(0)] * len(gl), rows, ["=="] * dim, list(_frac_vec(v)),
                   [True] * len(gl))
    return res.status == "optimal"


class OrderingCone:
    """Pointed polyhedral cone with nonempty interior, used as a partial order.

    Parameters
    ----------
    dim : ambient dimension.
    generators : nonzero rational vectors spanning the cone.  Ints, floats,
        and "p/q" strings are accepted and converted exactly.
    """

    def __init__(self, dim: int, generators: Iterable[Sequence], validate: bool = True):
        if dim < 1:
            raise ConeError("dimension must be positive")
        gens = [self._check_vec(dim, g) for g in generators]
        if not gens:
            raise ConeError("at least one generator is required")
        if dim > 3 and not self._is_orthant_basis(dim, gens):
            raise ConeError("dimensions above 3 are supported for the "
                            "nonnegative orthant only")
        self.dim = dim
        self.generators = tuple(canonical_ray(g) for g in gens)
        self._dual: tuple[tuple[Fraction, ...], ...] | None = None
        self._dual_float = None
        if validate:
            self._validate()

    @staticmethod
    def _check_vec(dim, g):
        v = _frac_vec(g)
        if len(v) != dim:
            raise ConeError(f"generator {g!r} has wrong dimension")
        if all(t == 0 for t in v):
            raise ConeError("zero vector cannot generate a ray")
        return v

    @staticmethod
    def _is_orthant_basis(dim, gens) -> bool:
        basis = {tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)}
        return {canonical_ray(g) for g in gens} == basis

    @classmethod
    def orthant(cls, dim: int) -> "OrderingCone":
        gens = [[int(i == j) for j in range(dim)] for i in range(dim)]
        cone = cls(dim, gens, validate=False)
        cone._dual = cone.generators
        return cone

    @property
    def dual_generators(self) -> tuple[tuple[Fraction, ...], ...]:
        """Rows h with the cone equal to {v : <h, v> >= 0 for all h};
        simultaneously the generators of the dual cone."""
        if self._dual is None:
            self._dual = tuple(cone_dual_generators(self.generators, self.dim))
        return self._dual

    def _dual_floats(self):
        if self._dual_float is None:
            self._dual_float = [tuple(float(t) for t in h) for h in self.dual_generators]
        return self._dual_float

    def _validate(self) -> None:
        n = len(self.generators)
        # pointed <=> the dual cone is full-dimensional
        res = solve_lp([Fraction(0)] * self.dim, list(self.generators),
                       [">="] * n, [Fraction(1)] * n, [False] * self.dim)
        if res.status != "optimal":
            raise ConeError("cone is not pointed")
        dual = self.dual_generators
        # nonempty interior <=> strictly positive point against every dual row
        res = solve_lp([Fraction(0)] * self.dim, list(dual),
                       [">="] * len(dual), [Fraction(1)] * len(dual),
                       [False] * self.dim)
        if res.status != "optimal":
            raise ConeError("cone has empty interior")

    # -- queries ----------------------------------------------------------

    def contains(self, z: Sequence, mode: str = "closed", tol: float = 0.0) -> bool:
        """Membership of z in the cone (mode='closed') or its topological
        interior (mode='interior').  ``tol`` is an absolute slack on the
        defining inner products: closed tests use >= -tol, interior > tol."""
        if mode not in ("closed", "interior"):
            raise ConeError(f"unknown mode {mode!r}")
        if len(z) != self.dim:
            raise ConeError(f"vector {z!r} has wrong dimension")
        if tol == 0.0 and all(isinstance(t, (int, Fraction)) for t in z):
            zf = _frac_vec(z)
            for h in self.dual_generators:
                p = sum(hi * zi for hi, zi in zip(h, zf))
                if (p < 0) if mode == "closed" else (p <= 0):
                    return False
            return True
        zf = [float(t) for t in z]
        for h in self._dual_floats():
            p = sum(hi * zi for hi, zi in zip(h, zf))
            if (p < -tol) if mode == "closed" else (p <= tol):
                return False
        return True

    def dual_cone(self) -> "OrderingCone":
        """The dual cone, with generators computed by extreme-ray enumeration
        and the original generators as its inequality representation."""
        dual = OrderingCone(self.dim, self.dual_generators, validate=False)
        dual._dual = tuple(sorted(canonical_ray(g) for g in self.generators))
        return dual

    def strict_dual_contains(self, z_star: Sequence) -> bool:
        """Membership in {z* : <z*, z> > 0 for every nonzero cone z}, decided
        through strict positivity against all generators."""
        if len(z_star) != self.dim:
            raise ConeError("dimension mismatch")
        if all(isinstance(t, (int, Fraction)) for t in z_star):
            zs = _frac_vec(z_star)
            return all(sum(a * b for a, b in zip(zs, g)) > 0 for g in self.generators)
        zs = [float(t) for t in z_star]
        return all(sum(a * float(b) for a, b in zip(zs, g)) > 0 for g in self.generators)

    # -- dual sphere sampling ---------------------------------------------

    def dual_sphere_grid(self, resolution: int, norm: str = "2") -> list[tuple[float, ...]]:
        """Deterministic sample of (dual cone) intersect (unit sphere).

        dim 2: `resolution` equally spaced angles between the extreme rays of
        the dual cone, endpoints included.  dim >= 3: normalized convex
        combinations of the dual generators over a simplex grid.  ``norm``
        selects the sphere: "2" (default), "1" or "inf".
        """
        if resolution < 2:
            raise ConeError("resolution must be at least 2")
        dual = self.dual_generators
        rays = [g for g in dual if canonical_ray([-t for t in g]) not in set(dual)]
        if not dual or (self.dim == 2 and len(rays) != 2):
            raise ConeError("dual cone is degenerate (empty interior)")
        if self.dim == 2:
            a0 = math.atan2(float(rays[0][1]), float(rays[0][0]))
            a1 = math.atan2(float(rays[1][1]), float(rays[1][0]))
            span = (a1 - a0) % (2 * math.pi)
            first, last = rays[0], rays[1]
            if span > math.pi:
                a0, a1 = a1, a0
                first, last = last, first
                span = (a1 - a0) % (2 * math.pi)
            out = [self._normed(tuple(float(t) for t in first), norm)]
            for k in range(1, resolution - 1):
                ang = a0 + span * k / (resolution - 1)
                out.append(self._normed((math.cos(ang), math.sin(ang)), norm))
            out.append(self._normed(tuple(float(t) for t in last), norm))
            return out
        gens = [tuple(float(t) for t in g) for g in dual]
        k = len(gens)
        pts = {}
        for combo in itertools.combinations_with_replacement(range(k), resolution - 1):
            w = [combo.count(i) for i in range(k)]
            v = tuple(sum(w[i] * gens[i][j] for i in range(k)) for j in range(self.dim))
            if all(abs(t) < 1e-15 for t in v):
                continue
            key = self._normed(v, "2")
            pts[tuple(round(t, 12) for t in key)] = self._normed(v, norm)
        return [pts[key] for key in sorted(pts)]

    @staticmethod
    def _normed(v, norm):
        if norm == "2":
            s = math.sqrt(sum(t * t for t in v))
        elif norm == "1":
            s = sum(abs(t) for t in v)
        elif norm == "inf":
            s = max(abs(t) for t in v)
        else:
            raise ConeError(f"unknown norm {norm!r}")
        return tuple(t / s for t in v)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        if self._is_orthant_basis(self.dim, list(self.generators)):
            return {"orthant": self.dim}
        return {"dim": self.dim,
                "generators": [[_num_json(t) for t in g] for g in self.generators]}

    @classmethod
    def from_json(cls, data) -> "OrderingCone":
        if isinstance(data, str):
            data = json.loads(data)
        if "orthant" in data:
            return cls.orthant(int(data["orthant"]))
        return cls(int(data["dim"]), data["generators"])

    def __eq__(self, other):
        return (isinstance(other, OrderingCone) and self.dim == other.dim
                and set(self.generators) == set(other.generators))

    def __hash__(self):
        return hash((self.dim, frozenset(self.generators)))

    def __repr__(self):
        if self._is_orthant_basis(self.dim, list(self.generators)):
            return f"OrderingCone.orthant({self.dim})"
        return f"OrderingCone(dim={self.dim}, generators={list(self.generators)!r})"


def _num_json(t: Fraction):
    if t.denominator == 1:
        return int(t)
    return f"{t.numerator}/{t.denominator}"
