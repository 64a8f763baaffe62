import math
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import brute_nondominated, hausdorff_inf, one_sided_inf
from moblab.cones import OrderingCone
from moblab.mo_core import (ImageSet, MoCoreError, domination_holds,
                            nondominated, weakly_nondominated)

O2 = OrderingCone.orthant(2)
O3 = OrderingCone.orthant(3)


class TestNondominated:
    def test_single_dominator(self):
        pts = [(0, 0), (1, 1), (1, 0), (0, 1)]
        assert nondominated(pts, O2) == [0]

    def test_pairwise_incomparable(self):
        assert nondominated([(0, 2), (1, 1), (2, 0)], O2) == [0, 1, 2]

    def test_quarter_ring_grid(self):
        # images of the quarter-ring-with-strip set on a 1/200 grid: every
        # reported point lies within one grid step of the closed-form
        # efficient set (quarter arc with open end, plus the strip corner)
        h = 1 / 200
        ax = np.arange(-1.5, 2.0 + h / 2, h)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        ring = (pts[:, 0] >= 0) & (pts[:, 1] >= 0) & \
            (pts[:, 0] ** 2 + pts[:, 1] ** 2 >= 1)
        strip = (pts[:, 0] >= -1) & (pts[:, 0] <= 0) & (pts[:, 1] >= 1)
        pts = pts[ring | strip]
        idx = nondominated(pts, O2)
        nd = pts[idx]
        # distance of each nondominated point to the analytic set
        for p in nd:
            d_arc = abs(math.hypot(*p) - 1.0) if p[0] > 0 and p[1] >= 0 else 2.0
            d_corner = max(abs(p[0] + 1), abs(p[1] - 1))
            assert min(d_arc, d_corner) <= 2 * h

    def test_empty_input_is_an_error(self):
        with pytest.raises(MoCoreError):
            nondominated([], O2)


class TestWeaklyNondominated:
    def test_weak_keeps_non_strictly_dominated(self):
        pts = [(0, 1), (0, 2), (1, 0)]
        assert weakly_nondominated(pts, O2) == [0, 1, 2]
        assert nondominated(pts, O2) == [0, 2]

    def test_singleton(self):
        assert weakly_nondominated([(0, 0)], O2) == [0]

    def test_sine_height_grid(self):
        # weak efficiency of (sin y, y) on [0, 2 pi]: {0} union [pi, 3pi/2]
        h = math.pi / 1000
        ys = np.arange(0.0, 2 * math.pi + h / 2, h)
        ys = np.unique(np.concatenate([ys, [0.0, math.pi, 1.5 * math.pi]]))
        pts = np.column_stack([np.sin(ys), ys])
        idx = weakly_nondominated(pts, O2, tol=1e-12)
        got = ys[idx]
        assert any(abs(t - math.pi) < 1e-15 for t in got)
        assert any(abs(t - 1.5 * math.pi) < 1e-15 for t in got)
        for t in got:
            ok = abs(t) <= h or (math.pi - h <= t <= 1.5 * math.pi + h)
            assert ok, t


class TestDominationHolds:
    def test_finite_sets_always_strong(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 40))
            pts = [tuple(map(float, rng.integers(-5, 6, size=2)))
                   for _ in range(n)]
            holds, witness = domination_holds(pts, O2, "strong")
            assert holds and witness is None

    def test_quarter_ring_domination(self):
        h = 1 / 40
        ax = np.arange(-1.5, 2.0 + h / 2, h)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        keep = ((pts[:, 0] >= 0) & (pts[:, 1] >= 0) &
                (pts[:, 0] ** 2 + pts[:, 1] ** 2 >= 1)) | \
               ((pts[:, 0] >= -1) & (pts[:, 0] <= 0) & (pts[:, 1] >= 1))
        holds, _ = domination_holds([tuple(p) for p in pts[keep]], O2, "strong")
        assert holds

    def test_tilting_segment_weak_domination(self):
        # image segment conv{(0,0),(x,1)} at x = 1, sampled
        ts = np.linspace(0, 1, 101)
        pts = [(t, t) for t in ts]
        holds, _ = domination_holds(pts, O2, "weak")
        assert holds

    def test_witness_on_failure(self):
        # weak domination of {(0,1),(1,0)} vs a far point fails only if the
        # far point is not covered; build an artificial failing check
        holds, witness = domination_holds([(0, 1), (1, 0), (-1, -1)], O2,
                                          "weak")
        assert holds  # (-1,-1) is itself weakly nondominated
        assert witness is None


class TestInvariantsAndOracle:
    def test_bruteforce_oracle_500_instances(self, rng):
        for _ in range(500):
            q = int(rng.integers(2, 4))
            n = int(rng.integers(1, 201))
            pts = [tuple(map(float, rng.integers(0, 12, size=q)))
                   for _ in range(n)]
            cone = OrderingCone.orthant(q)
            nd = nondominated(pts, cone)
            wnd = weakly_nondominated(pts, cone)
            assert nd == brute_nondominated(pts)
            assert wnd == brute_nondominated(pts, weak=True)
            # inclusion and scale invariance on the same instance
            assert set(nd) <= set(wnd)
            scaled = [tuple(3.0 * t for t in p) for p in pts]
            assert nondominated(scaled, cone) == nd
            assert weakly_nondominated(scaled, cone) == wnd

    def test_idempotence(self, rng):
        for _ in range(50):
            pts = [tuple(map(float, rng.integers(0, 8, size=2)))
                   for _ in range(int(rng.integers(1, 60)))]
            nd = [pts[i] for i in nondominated(pts, O2)]
            again = [nd[i] for i in nondominated(nd, O2)]
            assert set(again) == set(nd)

    def test_ties_are_both_retained(self):
        pts = [(1.0, 1.0), (1.0, 1.0), (2.0, 2.0)]
        assert nondominated(pts, O2) == [0, 1]

    def test_exact_fraction_path_agrees_with_float_path(self):
        pts = [(F(1, 3), F(2, 3)), (F(2, 3), F(1, 3)), (F(1, 3), F(1, 3))]
        floats = [tuple(float(t) for t in p) for p in pts]
        assert nondominated(pts, O2) == nondominated(floats, O2)

    def test_nonorthant_cone_agrees_with_bruteforce_products(self, rng):
        cone = OrderingCone(2, [(1, 2), (2, 1)])
        duals = [tuple(float(t) for t in h) for h in cone.dual_generators]
        for _ in range(100):
            n = int(rng.integers(1, 40))
            pts = [tuple(map(float, rng.integers(-4, 5, size=2)))
                   for _ in range(n)]
            got = nondominated(pts, cone)
            exp = []
            for i, a in enumerate(pts):
                dom = False
                for j, b in enumerate(pts):
                    if i == j or a == b:
                        continue
                    d = (a[0] - b[0], a[1] - b[1])
                    if all(h[0] * d[0] + h[1] * d[1] >= 0 for h in duals):
                        dom = True
                        break
                if not dom:
                    exp.append(i)
            assert got == exp

    def test_strict_quasiconvex_coincidence(self):
        # componentwise strictly convex objectives on a convex grid: the
        # efficient and weakly efficient grid sets are one step apart
        h = 1 / 50
        ax = np.arange(0.0, 1.0 + h / 2, h)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        ys = np.column_stack([gx.ravel(), gy.ravel()])
        f1 = (ys[:, 0] - 0.2) ** 2 + (ys[:, 1] - 0.8) ** 2
        f2 = (ys[:, 0] - 0.9) ** 2 + (ys[:, 1] - 0.1) ** 2
        pts = np.column_stack([f1, f2])
        eff = ys[nondominated(pts, O2)]
        weff = ys[weakly_nondominated(pts, O2)]
        assert hausdorff_inf(eff, weff) <= h + 1e-12


class TestImageSet:
    def test_csv_round_trip(self):
        s = ImageSet([(0.0, 1.5), (2.25, -1.0)], ["a", "b"])
        assert ImageSet.from_csv(s.to_csv(), labeled=True) == s

    def test_json_round_trip(self):
        s = ImageSet([(0.0, 1.5), (2.25, -1.0)])
        assert ImageSet.from_json(s.to_json()) == s

    def test_dimension_validation(self):
        with pytest.raises(MoCoreError):
            ImageSet([(1, 2), (1, 2, 3)])

    def test_label_uniqueness(self):
        with pytest.raises(MoCoreError):
            ImageSet([(1, 2), (3, 4)], ["a", "a"])
