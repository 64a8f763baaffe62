"""Exact rational linear programming via two-phase simplex with Bland's rule.

Dense tableaus over ``fractions.Fraction``; intended for desk-scale problems
(tens of variables and rows).  Every successful solve carries an exact dual
vector and is verified against strong duality before it is returned, so a
returned optimum is bit-exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["LPResult", "solve_lp", "gauss_solve", "nullspace", "SimplexError"]

LE, GE, EQ = "<=", ">=", "=="
_SENSES = (LE, GE, EQ)


class SimplexError(RuntimeError):
    """Internal inconsistency (failed self-check) in the simplex engine."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v)  # exact binary expansion
    return Fraction(v)


@dataclass(frozen=True)
class LPResult:
    """Outcome of an exact LP solve.

    status is one of 'optimal', 'infeasible', 'unbounded'.  For an optimal
    solve, ``x`` is an optimal basic solution, ``value`` the optimal value and
    ``y`` exact duals for the original rows (sense conventions of a
    minimization problem: '>=' rows have y >= 0, '<=' rows y <= 0).
    """

    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    y: tuple[Fraction, ...] | None = None


def gauss_solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Solve the square/rectangular system a·x = b exactly.

    Returns one solution (free variables set to 0) or None if inconsistent.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [list(map(_frac, row)) + [_frac(bi)] for row, bi in zip(a, b)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for pr, pc in pivots:
        x[pc] = rows[pr][n]
    return x


def nullspace(a: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact basis of the null space of the matrix ``a``."""
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [list(map(_frac, row)) for row in a]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for pr, pc in enumerate(pivots):
            v[pc] = -rows[pr][fc]
        basis.append(v)
    return basis


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    pv = tab[r][c]
    tab[r] = [v / pv for v in tab[r]]
    for i in range(len(tab)):
        if i != r and tab[i][c] != 0:
            f = tab[i][c]
            tab[i] = [vi - f * vr for vi, vr in zip(tab[i], tab[r])]
    basis[r] = c


def _bland(tab: list[list[Fraction]], basis: list[int], cost: list[Fraction],
           allowed: Sequence[bool]) -> str:
    """Minimize cost over the tableau in place; returns 'optimal'/'unbounded'."""
    m = len(tab)
    ncols = len(tab[0]) - 1
    while True:
        # reduced costs: c_j - c_B . column_j
        cb = [cost[basis[i]] for i in range(m)]
        entering = -1
        for j in range(ncols):
            if not allowed[j] or j in basis:
                continue
            red = cost[j] - sum(cb[i] * tab[i][j] for i in range(m))
            if red < 0:
                entering = j
                break
        if entering < 0:
            return "optimal"
        leaving = -1
        best: Fraction | None = None
        for i in range(m):
            if tab[i][entering] > 0:
                ratio = tab[i][-1] / tab[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        _pivot(tab, basis, leaving, entering)


def solve_lp(c: Sequence, rows: Sequence[Sequence], senses: Sequence[str],
             rhs: Sequence, nonneg: Sequence[bool]) -> LPResult:
    """Minimize c.x subject to rows[i].x (senses[i]) rhs[i].

    ``nonneg[j]`` marks x_j >= 0; other variables are free.  All data is
    converted to exact rationals.  Strong duality is asserted on every optimal
    solve.
    """
    c = [_frac(v) for v in c]
    rhs = [_frac(v) for v in rhs]
    rows = [[_frac(v) for v in row] for row in rows]
    n = len(c)
    m = len(rows)
    for s in senses:
        if s not in _SENSES:
            raise ValueError(f"unknown sense {s!r}")

    # Split free variables x_j = p_j - q_j, p,q >= 0.
    split: list[int] = [j for j in range(n) if not nonneg[j]]
    ext = {j: n + k for k, j in enumerate(split)}
    nx = n + len(split)

    def extend(vec: list[Fraction]) -> list[Fraction]:
        return vec + [-vec[j] for j in split]

    cx = extend(c)
    arows = [extend(list(r)) for r in rows]

    # Slack/surplus columns -> equality form with b >= 0.
    ncols = nx + m  # one slack-ish column per row (zero column for '==')
    tab: list[list[Fraction]] = []
    sign = [Fraction(1)] * m
    slack_col = [-1] * m
    for i in range(m):
        row = arows[i] + [Fraction(0)] * m + [rhs[i]]
        if senses[i] == LE:
            row[nx + i] = Fraction(1)
            slack_col[i] = nx + i
        elif senses[i] == GE:
            row[nx + i] = Fraction(-1)
            slack_col[i] = nx + i
        if row[-1] < 0:
            row = [-v for v in row]
            sign[i] = Fraction(-1)
        tab.append(row)

    # Phase 1: artificial basis where no natural one exists.
    basis = [-1] * m
    art_cols: list[int] = []
    for i in range(m):
        j = slack_col[i]
        if j >= 0 and tab[i][j] == 1:
            basis[i] = j
    n_art = sum(1 for b in basis if b < 0)
    total = ncols + n_art
    k = 0
    for i in range(m):
        tab[i] = tab[i][:-1] + [Fraction(0)] * n_art + [tab[i][-1]]
        if basis[i] < 0:
            col = ncols + k
            tab[i][col] = Fraction(1)
            basis[i] = col
            art_cols.append(col)
            k += 1
    drop_rows: list[int] = []
    if art_cols:
        cost1 = [Fraction(0)] * total
        for j in art_cols:
            cost1[j] = Fraction(1)
        allowed = [True] * total
        if _bland(tab, basis, cost1, allowed) != "optimal":
            raise SimplexError("phase-1 cannot be unbounded")
        val1 = sum(cost1[basis[i]] * tab[i][-1] for i in range(m))
        if val1 != 0:
            return LPResult(status="infeasible")
        # Drive remaining artificials out of the basis.
        for i in range(m):
            if basis[i] in art_cols:
                piv = next((j for j in range(ncols) if tab[i][j] != 0), None)
                if piv is None:
                    drop_rows.append(i)
                else:
                    _pivot(tab, basis, i, piv)
        for i in reversed(drop_rows):
            del tab[i], basis[i]

    # Phase 2.
    cost2 = [Fraction(0)] * len(tab[0][:-1])
    for j in range(nx):
        cost2[j] = cx[j]
    allowed = [j < ncols for j in range(len(cost2))]
    status = _bland(tab, basis, cost2, allowed)
    if status == "unbounded":
        return LPResult(status="unbounded")

    xext = [Fraction(0)] * nx
    for i, b in enumerate(basis):
        if b < nx:
            xext[b] = tab[i][-1]
    x = [xext[j] for j in range(n)]
    for j in split:
        x[j] -= xext[ext[j]]
    value = sum(ci * xi for ci, xi in zip(c, x))

    # Duals: solve y.B = c_B against the sign-corrected standard-form columns
    # of the surviving rows, then undo the row negations.
    morig = m
    orig_index = _surviving_rows(morig, drop_rows)

    bt = []  # basic columns of the standard-form matrix (restricted to survivors)
    cb = []
    for bcol in basis:
        col = _standard_column(arows, senses, sign, slack_col, nx, morig, bcol, orig_index)
        bt.append(col)
        cb.append(cost2[bcol] if bcol < len(cost2) else Fraction(0))
    if bt:
        # each bt entry is one basic column over the surviving rows, so the
        # system "sum_i y_i * column[i] = c_B" has bt as its coefficient rows
        ystd = gauss_solve([list(col) for col in bt], cb)
        if ystd is None:
            raise SimplexError("singular basis while extracting duals")
    else:
        ystd = []
    y = [Fraction(0)] * morig
    for row_pos, orig_i in enumerate(orig_index):
        y[orig_i] = sign[orig_i] * ystd[row_pos]

    _check_duality(c, rows, senses, rhs, nonneg, x, y, value)
    return LPResult(status="optimal", value=value, x=tuple(x), y=tuple(y))


def _surviving_rows(morig: int, drop_rows: list[int]) -> list[int]:
    alive = list(range(morig))
    for i in reversed(sorted(drop_rows)):
        del alive[i]
    return alive


def _standard_column(arows, senses, sign, slack_col, nx, morig, col, orig_index):
    """Column ``col`` of the sign-corrected standard-form matrix, restricted
    to surviving rows."""
    out = []
    for i in orig_index:
        if col < nx:
            v = arows[i][col]
        elif slack_col[i] == col:
            v = Fraction(1) if senses[i] == LE else Fraction(-1)
        elif col < nx + morig:
            v = Fraction(0)
        else:
            v = Fraction(0)  # artificial: only basic in dropped rows
        out.append(sign[i] * v)
    return out


def _check_duality(c, rows, senses, rhs, nonneg, x, y, value) -> None:
    m = len(rows)
    n = len(c)
    # primal feasibility
    for i in range(m):
        lhs = sum(rows[i][j] * x[j] for j in range(n))
        ok = lhs <= rhs[i] if senses[i] == LE else lhs >= rhs[i] if senses[i] == GE else lhs == rhs[i]
        if not ok:
            raise SimplexError("primal infeasibility at reported optimum")
    for j in range(n):
        if nonneg[j] and x[j] < 0:
            raise SimplexError("sign violation at reported optimum")
    # dual feasibility (min problem: '>=' rows y>=0, '<=' rows y<=0)
    for i in range(m):
        if senses[i] == GE and y[i] < 0:
            raise SimplexError("dual sign violation")
        if senses[i] == LE and y[i] > 0:
            raise SimplexError("dual sign violation")
    for j in range(n):
        red = c[j] - sum(y[i] * rows[i][j] for i in range(m))
        if nonneg[j]:
            if red < 0:
                raise SimplexError("dual constraint violation")
        elif red != 0:
            raise SimplexError("dual equality violation on free variable")
    dual_value = sum(y[i] * rhs[i] for i in range(m))
    if dual_value != value:
        raise SimplexError("strong duality gap is nonzero")
