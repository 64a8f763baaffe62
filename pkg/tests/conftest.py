"""Shared test helpers: independent brute-force dominance oracles and
Hausdorff distances, kept deliberately separate from the production code
paths they check."""

import numpy as np
import pytest


def brute_nondominated(points, weak=False):
    """Independent O(n^2) double-loop dominance check for the nonnegative
    orthant, written from the componentwise definition."""
    pts = [tuple(p) for p in points]
    out = []
    for i, a in enumerate(pts):
        dominated = False
        for j, b in enumerate(pts):
            if i == j:
                continue
            if weak:
                if all(bb < aa for aa, bb in zip(a, b)):
                    dominated = True
                    break
            else:
                if b != a and all(bb <= aa for aa, bb in zip(a, b)):
                    dominated = True
                    break
        if not dominated:
            out.append(i)
    return out


def hausdorff_inf(a, b):
    """Hausdorff distance in the max norm between two finite point sets."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return float("inf")
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def one_sided_inf(a, b):
    """sup over a of the max-norm distance to b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0:
        return 0.0
    if len(b) == 0:
        return float("inf")
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return float(d.min(axis=1).max())


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
