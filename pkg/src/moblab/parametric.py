"""Parametric multiobjective problems: objective evaluators, feasibility
descriptors, grid specifications and deterministic feasible-set sampling.

Problems can be built programmatically, loaded from the worked-example
catalog (see :mod:`moblab.catalog`), or ingested from a JSON problem spec
with a small arithmetic expression grammar (+, -, *, /, ** or ^, sin, cos,
sqrt, abs) so that instances are reproducible from plain files.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cones import OrderingCone
from .simplex import solve_lp

__all__ = [
    "ParametricError", "ExprFunction", "FeasibilityDescriptor", "GridSpec",
    "ParametricMOP", "feasible_sample", "feasible_array", "problem_from_spec",
    "catalog_get",
]


class ParametricError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------

_ALLOWED_CALLS = {"sin": np.sin, "cos": np.cos, "sqrt": np.sqrt, "abs": np.abs}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name,
                  ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
                  ast.USub, ast.UAdd, ast.Load)


def _compile_expr(expr: str, names: set[str]):
    src = expr.replace("^", "**")
    tree = ast.parse(src, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ParametricError(f"disallowed syntax in expression {expr!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
                raise ParametricError(f"disallowed function in expression {expr!r}")
        if isinstance(node, ast.Name) and node.id not in names and node.id not in _ALLOWED_CALLS:
            if node.id not in ("pi", "e"):
                raise ParametricError(f"unknown name {node.id!r} in expression {expr!r}")
    return compile(tree, f"<expr {expr!r}>", "eval")


class ExprFunction:
    """Vector of arithmetic expressions in x1..xn, y1..ym (aliases x, y when
    the block is one-dimensional), evaluated with numpy semantics so the same
    object serves scalar points and (N, m) batches."""

    def __init__(self, exprs: Sequence[str], n: int, m: int):
        self.exprs = list(exprs)
        self.n, self.m = n, m
        names = {f"x{i+1}" for i in range(n)} | {f"y{j+1}" for j in range(m)}
        if n == 1:
            names.add("x")
        if m == 1:
            names.add("y")
        self._code = [_compile_expr(e, names) for e in self.exprs]

    def _env(self, x, y_cols):
        env = {"pi": math.pi, "e": math.e, "__builtins__": {}}
        env.update(_ALLOWED_CALLS)
        for i, xv in enumerate(x):
            env[f"x{i+1}"] = xv
        if self.n == 1:
            env["x"] = x[0]
        for j, col in enumerate(y_cols):
            env[f"y{j+1}"] = col
        if self.m == 1:
            env["y"] = y_cols[0]
        return env

    def __call__(self, x: Sequence[float], y: Sequence[float]) -> tuple:
        env = self._env(tuple(x), tuple(y))
        return tuple(float(eval(c, env)) for c in self._code)

    def batch(self, x: Sequence[float], ys: np.ndarray) -> np.ndarray:
        env = self._env(tuple(x), tuple(ys[:, j] for j in range(ys.shape[1])))
        cols = []
        for c in self._code:
            v = eval(c, env)
            cols.append(np.broadcast_to(np.asarray(v, dtype=float), (len(ys),)))
        return np.column_stack(cols)


# ---------------------------------------------------------------------------
# feasibility descriptors
# ---------------------------------------------------------------------------

@dataclass
class FeasibilityDescriptor:
    """Closed feasible-set description for the lower-level mapping.

    kind 'box': static per-axis bounds.
    kind 'polyhedral': {y : A x + B y <= d}; a sampling box is derived by
        exact LPs per coordinate when not given (error if unbounded).
    kind 'oracle': membership callable plus a mandatory truncation box
        (static or callable of x); `unbounded` marks a genuinely unbounded
        set whose grid output must carry a truncation caveat.
    """

    kind: str
    bounds: list[tuple[float, float]] | None = None
    A: list | None = None
    B: list | None = None
    d: list | None = None
    membership: Callable | None = None
    batch_membership: Callable | None = None
    box_fn: Callable | None = None
    unbounded: bool = False
    _box_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("box", "polyhedral", "oracle"):
            raise ParametricError(f"unknown feasibility kind {self.kind!r}")
        if self.kind == "box" and self.bounds is None:
            raise ParametricError("box descriptor needs bounds")
        if self.kind == "polyhedral" and (self.A is None or self.B is None or self.d is None):
            raise ParametricError("polyhedral descriptor needs A, B, d")
        if self.kind == "oracle":
            if self.membership is None:
                raise ParametricError("oracle descriptor needs a membership callable")
            if self.bounds is None and self.box_fn is None:
                raise ParametricError("oracle descriptor always carries a "
                                      "finite truncation box")

    def box_for(self, x: tuple) -> list[tuple[float, float]]:
        if self.box_fn is not None:
            return [tuple(b) for b in self.box_fn(x)]
        if self.bounds is not None:
            return [tuple(b) for b in self.bounds]
        # polyhedral without explicit box: exact per-coordinate LPs
        key = tuple(x)
        if key not in self._box_cache:
            a = [[Fraction(v) for v in row] for row in self.A]
            b = [[Fraction(v) for v in row] for row in self.B]
            d = [Fraction(v) for v in self.d]
            xe = [Fraction(t) for t in x]
            rhs = [di - sum(ai * xi for ai, xi in zip(arow, xe))
                   for arow, di in zip(a, d)]
            m = len(b[0])
            box = []
            for j in range(m):
                lo_hi = []
                for sgn in (1, -1):
                    c = [Fraction(0)] * m
                    c[j] = Fraction(sgn)
                    res = solve_lp(c, b, ["<="] * len(b), rhs, [False] * m)
                    if res.status != "optimal":
                        raise ParametricError(
                            "unbounded polyhedral feasible set without a "
                            "truncation box")
                    lo_hi.append(float(res.value) * sgn)
                box.append((lo_hi[0], lo_hi[1]))
            self._box_cache[key] = box
        return self._box_cache[key]

    def contains(self, x: tuple, y: tuple) -> bool:
        if self.kind == "box":
            return all(lo - 1e-12 <= t <= hi + 1e-12
                       for t, (lo, hi) in zip(y, self.bounds))
        if self.kind == "polyhedral":
            for arow, brow, di in zip(self.A, self.B, self.d):
                lhs = sum(float(a) * t for a, t in zip(arow, x)) + \
                    sum(float(b) * t for b, t in zip(brow, y))
                if lhs > float(di) + 1e-12:
                    return False
            return True
        return bool(self.membership(x, y))

    def mask(self, x: tuple, ys: np.ndarray) -> np.ndarray:
        if self.kind == "box":
            lo = np.asarray([b[0] for b in self.bounds])
            hi = np.asarray([b[1] for b in self.bounds])
            return ((ys >= lo - 1e-12) & (ys <= hi + 1e-12)).all(axis=1)
        if self.kind == "polyhedral":
            a = np.asarray(self.A, dtype=float)
            b = np.asarray(self.B, dtype=float)
            d = np.asarray(self.d, dtype=float)
            lhs = ys @ b.T + (a @ np.asarray(x, dtype=float))
            return (lhs <= d + 1e-12).all(axis=1)
        if self.batch_membership is not None:
            return np.asarray(self.batch_membership(x, ys), dtype=bool)
        return np.asarray([bool(self.membership(x, tuple(p))) for p in ys])


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass
class GridSpec:
    """Axis-aligned grid: per-axis (lo, hi, step) plus exact probe points
    that are force-included."""

    axes: list[tuple[float, float, float]]
    probe_points: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        for lo, hi, step in self.axes:
            if step <= 0:
                raise ParametricError("grid steps must be strictly positive")
            if hi < lo:
                raise ParametricError("grid upper bound below lower bound")
        for p in self.probe_points:
            if len(p) != len(self.axes):
                raise ParametricError("probe point dimension mismatch")
            for t, (lo, hi, _) in zip(p, self.axes):
                if not (lo - 1e-9 <= t <= hi + 1e-9):
                    raise ParametricError(f"probe point {p!r} outside bounds")

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def max_step(self) -> float:
        return max(step for _, _, step in self.axes)

    def axis_values(self, i: int) -> np.ndarray:
        lo, hi, step = self.axes[i]
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(count)

    def points(self, extra_points: tuple = ()) -> np.ndarray:
        """Cartesian product of the axis grids plus probe points (and any
        extra force-included points), lexicographically sorted, duplicates
        removed.  Cached per extra-point set; treat the result as read-only."""
        cache = self.__dict__.setdefault("_points_cache", {})
        key = tuple(extra_points)
        if key not in cache:
            grids = np.meshgrid(*[self.axis_values(i) for i in range(self.dim)],
                                indexing="ij")
            pts = np.column_stack([g.ravel() for g in grids])
            merge = [tuple(p) for p in self.probe_points] + list(key)
            if merge:
                pts = np.vstack([pts, np.asarray(merge, dtype=float)])
            cache[key] = np.unique(pts, axis=0)
        return cache[key]

    def refined(self, factor: int) -> "GridSpec":
        return GridSpec([(lo, hi, step / factor) for lo, hi, step in self.axes],
                        list(self.probe_points))

    def coarsened(self, factor: int) -> "GridSpec":
        return GridSpec([(lo, hi, step * factor) for lo, hi, step in self.axes],
                        list(self.probe_points))


# ---------------------------------------------------------------------------
# parametric problems
# ---------------------------------------------------------------------------

@dataclass
class ParametricMOP:
    """Lower-level problem data: objective f, feasibility mapping, ordering
    cone, dimensions, and (for catalog entries) analytic oracles."""

    name: str
    n: int
    m: int
    q: int
    f: Callable
    gamma: FeasibilityDescriptor
    cone: OrderingCone
    x_box: list[tuple[float, float]]
    f_batch: Callable | None = None
    oracles: dict = field(default_factory=dict)
    probe_points: list[tuple] = field(default_factory=list)
    probe_cases: list = field(default_factory=list)
    convex: bool = False
    dominance_tol: float = 0.0
    notes: str = ""

    def check_x(self, x) -> tuple:
        if np.isscalar(x):
            x = (float(x),)
        x = tuple(float(t) for t in x)
        if len(x) != self.n:
            raise ParametricError(f"parameter {x!r} has wrong dimension")
        for t, (lo, hi) in zip(x, self.x_box):
            if not (lo - 1e-9 <= t <= hi + 1e-9):
                raise ParametricError(f"parameter {x!r} outside the problem's "
                                      f"parameter box {self.x_box}")
        return x

    def images(self, x: tuple, ys: np.ndarray) -> np.ndarray:
        if len(ys) == 0:
            return np.zeros((0, self.q))
        if self.f_batch is not None:
            return np.asarray(self.f_batch(x, ys), dtype=float)
        return np.asarray([self.f(x, tuple(p)) for p in ys], dtype=float)

    def oracle(self, key: str):
        return self.oracles.get(key)


def feasible_array(problem: ParametricMOP, x, grid: GridSpec) -> np.ndarray:
    """(N, m) array of feasible grid points at parameter x, lexicographically
    sorted; probe points (grid-level and problem-level) force-included when
    feasible and inside the grid bounds."""
    x = problem.check_x(x)
    if grid.dim != problem.m:
        raise ParametricError("grid dimension does not match decision dimension")
    extra = tuple(
        tuple(float(t) for t in p) for p in problem.probe_points
        if all(lo - 1e-9 <= t <= hi + 1e-9
               for t, (lo, hi, _) in zip(p, grid.axes)))
    pts = grid.points(extra)
    keep = problem.gamma.mask(x, pts)
    return pts[keep]


def feasible_sample(problem: ParametricMOP, x, grid: GridSpec) -> list[tuple]:
    """Feasible grid points as a deterministic, lexicographically ordered
    list of tuples.  An empty feasible grid yields an empty list."""
    return [tuple(p) for p in feasible_array(problem, x, grid)]


# ---------------------------------------------------------------------------
# JSON problem specs
# ---------------------------------------------------------------------------

def _cone_from_json(data) -> OrderingCone:
    return OrderingCone.from_json(data)


def problem_from_spec(spec) -> ParametricMOP:
    """Build a ParametricMOP from a JSON problem spec (dict, JSON text, or
    path to a JSON file).  See the repository README for the schema."""
    if isinstance(spec, str):
        try:
            data = json.loads(spec)
        except json.JSONDecodeError:
            with open(spec, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    else:
        data = dict(spec)
    try:
        dims = data["dims"]
        n, m, q = int(dims["n"]), int(dims["m"]), int(dims["q"])
        cone = _cone_from_json(data["cone"])
        fexpr = ExprFunction(data["objective"], n, m)
        if len(fexpr.exprs) != q:
            raise ParametricError("objective must list q expressions")
        feas = data["feasibility"]
        kind = feas["kind"]
        if kind == "box":
            gamma = FeasibilityDescriptor("box", bounds=[tuple(b) for b in feas["bounds"]])
        elif kind == "polyhedral":
            gamma = FeasibilityDescriptor(
                "polyhedral", A=feas["A"], B=feas["B"], d=feas["d"],
                bounds=[tuple(b) for b in feas["box"]] if "box" in feas else None)
        elif kind == "inequalities":
            gexpr = ExprFunction(feas["exprs"], n, m)

            def membership(x, y, _g=gexpr):
                return all(v <= 1e-12 for v in _g(x, y))

            def batch_membership(x, ys, _g=gexpr):
                return (_g.batch(x, ys) <= 1e-12).all(axis=1)

            gamma = FeasibilityDescriptor(
                "oracle", membership=membership, batch_membership=batch_membership,
                bounds=[tuple(b) for b in feas["box"]],
                unbounded=bool(feas.get("unbounded", False)))
        else:
            raise ParametricError(f"unknown feasibility kind {kind!r}")
        problem = ParametricMOP(
            name=data.get("name", "inline"),
            n=n, m=m, q=q, f=fexpr, f_batch=fexpr.batch, gamma=gamma, cone=cone,
            x_box=[tuple(b) for b in data.get("x_box", [(-1.0, 1.0)] * n)],
            probe_points=[tuple(p) for p in data.get("probe_points", [])],
            convex=bool(data.get("convex", False)),
            dominance_tol=float(data.get("dominance_tol", 0.0)),
            notes=data.get("notes", ""))
    except KeyError as exc:
        raise ParametricError(f"problem spec is missing key {exc}") from exc
    return problem


def catalog_get(entry_id: str):
    """Fetch a worked example from the catalog; see moblab.catalog."""
    from .catalog import catalog_get as _get
    return _get(entry_id)
