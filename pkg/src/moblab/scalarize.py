"""Weighted-sum scalarization of the parametric lower level, the union
characterization of weak efficiency under convexity, and the linear-case
machinery (exact rational LP plus the all-ones hybrid efficiency test).

`LinearProgram`/`lp_solve` expose the exact simplex engine with rational
JSON round trips; every successful solve carries a zero-gap strong-duality
certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cones import OrderingCone
from .parametric import GridSpec, ParametricMOP, feasible_array
from .simplex import LPResult, solve_lp

__all__ = [
    "ScalarizeError", "ScalarizedProblem", "LinearProgram", "lp_solve",
    "scalarized_solve", "weak_efficiency_via_scalarization", "xi_sample",
    "linear_efficiency_test", "ScalarizationSweep",
]


class ScalarizeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalarized problems
# ---------------------------------------------------------------------------

@dataclass
class ScalarizedProblem:
    """One weighted-sum scalarization: parameter, weight, underlying problem."""

    problem: ParametricMOP
    x: tuple
    weight: tuple

    def __post_init__(self):
        self.x = self.problem.check_x(self.x)
        self.weight = _check_weight(self.problem.cone, self.weight)

    def objective(self, ys: np.ndarray) -> np.ndarray:
        z = self.problem.images(self.x, ys)
        return z @ np.asarray(self.weight)


def _check_weight(cone: OrderingCone, lam) -> tuple:
    lam = tuple(float(t) for t in lam)
    if len(lam) != cone.dim:
        raise ScalarizeError("weight dimension mismatch")
    if not cone.dual_cone().contains(lam, "closed", tol=1e-12):
        raise ScalarizeError(f"weight {lam!r} is outside the dual cone")
    nrm = math.sqrt(sum(t * t for t in lam))
    if abs(nrm - 1.0) > 1e-12:
        raise ScalarizeError(f"weight {lam!r} is not unit-norm (|{nrm}-1|>1e-12)")
    return lam


def scalarized_solve(problem: ParametricMOP, x, lam, grid: GridSpec,
                     atol: float = 1e-12) -> list[tuple]:
    """Exact argmin set of <lam, f(x, .)> over the feasible grid (float
    comparisons within `atol`)."""
    sp = ScalarizedProblem(problem, x if not np.isscalar(x) else (float(x),), lam)
    ys = feasible_array(problem, sp.x, grid)
    if len(ys) == 0:
        raise ScalarizeError(f"empty feasible grid at {x!r}")
    vals = sp.objective(ys)
    vmin = vals.min()
    keep = vals <= vmin + atol
    return [tuple(r) for r in ys[keep]]


@dataclass
class ScalarizationSweep:
    """Union of scalarized argmin sets over a weight grid."""

    x: tuple
    points: list[tuple]
    weights: list[tuple]
    equivalence: bool          # True when the convexity assumption is flagged
    warning: str = ""

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _tie_weight(cone: OrderingCone, za, zb) -> tuple | None:
    """Unit weight orthogonal to za - zb inside the dual cone (q = 2)."""
    d = (za[0] - zb[0], za[1] - zb[1])
    for cand in ((d[1], -d[0]), (-d[1], d[0])):
        nrm = math.hypot(*cand)
        if nrm < 1e-15:
            continue
        lam = (cand[0] / nrm, cand[1] / nrm)
        if cone.dual_cone().contains(lam, "closed", tol=1e-12):
            return lam
    return None


def weak_efficiency_via_scalarization(problem: ParametricMOP, x,
                                      lam_resolution: int, grid: GridSpec,
                                      atol: float = 1e-12) -> ScalarizationSweep:
    """Union of scalarized argmin sets over the dual sphere grid.

    For two objectives, adjacent grid weights with disjoint argmin sets are
    refined by the exact tie weight orthogonal to the difference of their
    argmin images (dichotomic refinement), so faces supported only at
    isolated weights are captured.  On problems not flagged convex the result
    is only a lower estimate of the weakly efficient set and says so.
    """
    x = problem.check_x(x)
    lams = list(problem.cone.dual_sphere_grid(lam_resolution))
    argmins = [scalarized_solve(problem, x, lam, grid, atol) for lam in lams]
    if problem.q == 2:
        extra = []
        for k in range(len(lams) - 1):
            sa, sb = set(argmins[k]), set(argmins[k + 1])
            if sa & sb:
                continue
            za = problem.f(x, next(iter(sa)))
            zb = problem.f(x, next(iter(sb)))
            lam = _tie_weight(problem.cone, za, zb)
            if lam is not None:
                extra.append(lam)
        for lam in extra:
            lams.append(lam)
            argmins.append(scalarized_solve(problem, x, lam, grid, atol))
    pts = sorted({p for am in argmins for p in am})
    warning = "" if problem.convex else \
        "problem not flagged convex: scalarization-reachable subset only, " \
        "not equivalent to the weakly efficient set"
    return ScalarizationSweep(x, pts, lams, problem.convex, warning)


def xi_sample(problem: ParametricMOP, x, y, lam_resolution: int,
              tol: float = 1e-9) -> list[tuple]:
    """Grid weights for which y is (within a relative tolerance) a scalarized
    minimizer at x; y must be feasible."""
    x = problem.check_x(x)
    y = tuple(float(t) for t in y)
    if not problem.gamma.contains(x, y):
        raise ScalarizeError(f"{y!r} is infeasible at {x!r}")
    grid = _default_xi_grid(problem, x)
    ys = feasible_array(problem, x, grid)
    ys = np.unique(np.vstack([ys, np.asarray([y])]), axis=0)
    zs = problem.images(x, ys)
    fy = np.asarray(problem.f(x, y))
    out = []
    for lam in problem.cone.dual_sphere_grid(lam_resolution):
        lv = np.asarray(lam)
        vals = zs @ lv
        vmin = vals.min()
        mine = float(fy @ lv)
        if mine <= vmin + tol * max(1.0, abs(vmin)):
            out.append(lam)
    return out


def _default_xi_grid(problem: ParametricMOP, x) -> GridSpec:
    box = problem.gamma.box_for(x)
    axes = [(float(lo), float(hi), max(float(hi) - float(lo), 1e-9) / 100)
            for lo, hi in box]
    return GridSpec(axes)


# ---------------------------------------------------------------------------
# exact linear programs (public contract over the simplex engine)
# ---------------------------------------------------------------------------

@dataclass
class LinearProgram:
    """min c.x s.t. rows[i].x (senses[i]) rhs[i]; nonneg marks sign-constrained
    variables.  All entries exact rationals ("3/7" strings welcome)."""

    c: list
    rows: list
    senses: list[str]
    rhs: list
    nonneg: list[bool] = field(default_factory=list)

    def __post_init__(self):
        self.c = [Fraction(v) for v in self.c]
        self.rows = [[Fraction(v) for v in row] for row in self.rows]
        self.rhs = [Fraction(v) for v in self.rhs]
        if not self.nonneg:
            self.nonneg = [False] * len(self.c)
        n = len(self.c)
        if any(len(r) != n for r in self.rows) or len(self.rhs) != len(self.rows) \
                or len(self.senses) != len(self.rows) or len(self.nonneg) != n:
            raise ScalarizeError("inconsistent linear program dimensions")

    def to_json(self) -> str:
        enc = lambda v: str(v) if v.denominator != 1 else int(v)
        return json.dumps({
            "objective": [enc(v) for v in self.c],
            "rows": [{"coeffs": [enc(v) for v in row], "sense": s,
                      "rhs": enc(b)}
                     for row, s, b in zip(self.rows, self.senses, self.rhs)],
            "nonneg": list(self.nonneg),
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text) -> "LinearProgram":
        data = json.loads(text) if isinstance(text, str) else text
        rows = [r["coeffs"] for r in data["rows"]]
        senses = [r["sense"] for r in data["rows"]]
        rhs = [r["rhs"] for r in data["rows"]]
        return cls(data["objective"], rows, senses, rhs,
                   list(data.get("nonneg", [])))


def lp_solve(lp: LinearProgram) -> LPResult:
    """Exact optimum with an optimal basic solution and exact duals; strong
    duality is verified on every optimal solve."""
    return solve_lp(lp.c, lp.rows, lp.senses, lp.rhs, lp.nonneg)


def linear_efficiency_test(D, A, B, d, x, y) -> bool:
    """All-ones hybrid scalarization test for efficiency in the fully linear
    setting: y is efficient iff min 1.D y' over {A x + B y' <= d, D y' <= D y}
    equals 1.D y.  Exact rational arithmetic; infeasible y raises."""
    D = [[Fraction(v) for v in row] for row in D]
    A = [[Fraction(v) for v in row] for row in A]
    B = [[Fraction(v) for v in row] for row in B]
    d = [Fraction(v) for v in d]
    x = [Fraction(v) for v in (x if isinstance(x, (list, tuple)) else (x,))]
    y = [Fraction(v) for v in y]
    m = len(B[0])
    rhs1 = [di - sum(ai * xi for ai, xi in zip(arow, x))
            for arow, di in zip(A, d)]
    for brow, b in zip(B, rhs1):
        if sum(bi * yi for bi, yi in zip(brow, y)) > b:
            raise ScalarizeError(f"{y!r} is infeasible for the linear system")
    dy = [sum(Di[j] * y[j] for j in range(m)) for Di in D]
    c = [sum(Di[j] for Di in D) for j in range(m)]
    rows = [list(brow) for brow in B] + [list(Di) for Di in D]
    rhs = rhs1 + dy
    res = solve_lp(c, rows, ["<="] * len(rows), rhs, [False] * m)
    if res.status != "optimal":
        raise ScalarizeError(f"hybrid scalarization solve status {res.status}")
    target = sum(ci * yi for ci, yi in zip(c, y))
    return res.value == target
