"""Finite-set multiobjective kernel: nondominance, weak nondominance, and
domination-property checks by exhaustive pairwise comparison.

The reference semantics is the O(n^2) pairwise test; a sort-scan fast path is
used for biobjective orthant instances (the common case for grid sweeps) and
a blocked vectorized path for everything else in floating point.  Exact
(rational/integer) inputs with zero tolerance take a pure-Python exact loop.
All paths are oracle-checked against each other in the test suite.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cones import OrderingCone

__all__ = ["ImageSet", "MoCoreError", "nondominated", "weakly_nondominated",
           "domination_holds"]


class MoCoreError(ValueError):
    pass


@dataclass
class ImageSet:
    """Finite list of image vectors in R^q with optional per-point labels."""

    points: list[tuple]
    labels: list[str] | None = None

    def __post_init__(self):
        self.points = [tuple(p) for p in self.points]
        if self.points:
            q = len(self.points[0])
            if any(len(p) != q for p in self.points):
                raise MoCoreError("image vectors must share one dimension")
        if self.labels is not None:
            if len(self.labels) != len(self.points):
                raise MoCoreError("one label per point is required")
            if len(set(self.labels)) != len(self.labels):
                raise MoCoreError("labels must be unique")

    @property
    def q(self) -> int:
        if not self.points:
            raise MoCoreError("empty image set has no dimension")
        return len(self.points[0])

    def __len__(self):
        return len(self.points)

    # -- round trips --------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        for i, p in enumerate(self.points):
            row = [repr(float(t)) for t in p]
            if self.labels is not None:
                row.append(self.labels[i])
            w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, labeled: bool = False) -> "ImageSet":
        points, labels = [], []
        for row in csv.reader(io.StringIO(text)):
            if not row:
                continue
            if labeled:
                points.append(tuple(float(t) for t in row[:-1]))
                labels.append(row[-1])
            else:
                points.append(tuple(float(t) for t in row))
        return cls(points, labels if labeled else None)

    def to_json(self) -> str:
        data = {"points": [[float(t) for t in p] for p in self.points]}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ImageSet":
        data = json.loads(text)
        return cls([tuple(p) for p in data["points"]], data.get("labels"))


def _as_points(images):
    if isinstance(images, ImageSet):
        pts = images.points
    elif isinstance(images, np.ndarray):
        pts = images
    else:
        pts = [tuple(p) for p in images]
    if len(pts) == 0:
        raise MoCoreError("empty image set (distinct from an empty "
                          "nondominated set, which cannot occur)")
    return pts


def _is_exact(pts) -> bool:
    if isinstance(pts, np.ndarray):
        return False
    return all(isinstance(t, (int, Fraction)) and not isinstance(t, bool)
               for p in pts for t in p)


def _is_orthant(cone: OrderingCone) -> bool:
    basis = {tuple(Fraction(int(i == j)) for j in range(cone.dim))
             for i in range(cone.dim)}
    return set(cone.generators) == basis


def nondominated(images, cone: OrderingCone, tol: float = 0.0) -> list[int]:
    """Indices i such that no j has images[i] - images[j] in cone \\ {0}.

    Identical image vectors are all retained.  ``tol`` is an absolute slack
    on cone membership (0 = exact comparisons).
    """
    return _dominance(images, cone, tol, weak=False)


def weakly_nondominated(images, cone: OrderingCone, tol: float = 0.0) -> list[int]:
    """Indices i such that no j has images[i] - images[j] in int(cone)."""
    return _dominance(images, cone, tol, weak=True)


def _dominance(images, cone, tol, weak: bool) -> list[int]:
    pts = _as_points(images)
    q = pts.shape[1] if isinstance(pts, np.ndarray) else len(pts[0])
    if q != cone.dim:
        raise MoCoreError("cone dimension does not match image dimension")
    if tol == 0.0 and _is_exact(pts) and len(pts) <= 600:
        return _exact_loop(pts, cone, weak)
    if tol == 0.0 and _is_orthant(cone) and q <= 2:
        return _orthant_scan(pts, weak)
    return _blocked(pts, cone, tol, weak)


def _exact_loop(pts, cone, weak) -> list[int]:
    out = []
    mode = "interior" if weak else "closed"
    for i, zi in enumerate(pts):
        dominated = False
        for j, zj in enumerate(pts):
            if i == j:
                continue
            d = tuple(Fraction(a) - Fraction(b) for a, b in zip(zi, zj))
            if not weak and all(t == 0 for t in d):
                continue
            if cone.contains(d, mode):
                dominated = True
                break
        if not dominated:
            out.append(i)
    return out


def _orthant_scan(pts, weak) -> list[int]:
    z = np.asarray(pts, dtype=float)
    n = len(pts)
    if z.shape[1] == 1:
        # with one objective, dominance and strict dominance both reduce to
        # "some strictly smaller value exists"
        keep = z[:, 0] <= z[:, 0].min()
        return list(np.nonzero(keep)[0])
    order = np.lexsort((z[:, 1], z[:, 0]))
    zs = z[order]
    # group by equal first coordinate
    newgrp = np.empty(n, dtype=bool)
    newgrp[0] = True
    newgrp[1:] = zs[1:, 0] != zs[:-1, 0]
    gid = np.cumsum(newgrp) - 1
    starts = np.nonzero(newgrp)[0]
    gmin = np.minimum.reduceat(zs[:, 1], starts)
    # prefix minimum of z1 over groups with strictly smaller z0
    cmin = np.minimum.accumulate(gmin)
    strict_prefix = np.full(len(gmin), np.inf)
    strict_prefix[1:] = cmin[:-1]
    if weak:
        dominated = strict_prefix[gid] < zs[:, 1]
    else:
        dominated = (strict_prefix[gid] <= zs[:, 1]) | (zs[:, 1] > gmin[gid])
    keep = np.ones(n, dtype=bool)
    keep[order] = ~dominated
    return list(np.nonzero(keep)[0])


def _blocked(pts, cone, tol, weak) -> list[int]:
    z = np.asarray(pts, dtype=float)
    n, q = z.shape
    d = np.asarray([[float(t) for t in h] for h in cone.dual_generators])
    g = z @ d.T
    k = g.shape[1]
    chunk = max(1, (1 << 22) // max(1, n * k))
    keep = np.ones(n, dtype=bool)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        # diff[i, j, :] = g[i] - g[j] for i in chunk
        diff = g[lo:hi, None, :] - g[None, :, :]
        if weak:
            dom = (diff > tol).all(axis=2)
        else:
            inC = (diff >= -tol).all(axis=2)
            same = (z[lo:hi, None, :] == z[None, :, :]).all(axis=2)
            dom = inC & ~same
        keep[lo:hi] = ~dom.any(axis=1)
    return list(np.nonzero(keep)[0])


def domination_holds(images, cone: OrderingCone, mode: str = "strong",
                     tol: float = 0.0):
    """Check images subset-of (nondominated set + cone) (mode='strong') or
    (weakly nondominated set + cone) (mode='weak').

    Returns (holds, witness): witness is the first uncovered image vector,
    or None when the property holds.
    """
    if mode not in ("strong", "weak"):
        raise MoCoreError(f"unknown mode {mode!r}")
    pts = _as_points(images)
    idx = (nondominated if mode == "strong" else weakly_nondominated)(pts, cone, tol)
    z = np.asarray(pts, dtype=float)
    d = np.asarray([[float(t) for t in h] for h in cone.dual_generators])
    g = z @ d.T
    gnd = g[idx]
    for i in range(len(pts)):
        diff = g[i][None, :] - gnd
        if not (diff >= -tol).all(axis=1).any():
            return False, pts[i]
    return True, None
