import math

import numpy as np
import pytest

from conftest import hausdorff_inf, one_sided_inf
from moblab.catalog import catalog_get
from moblab.mappings import (InfeasiblePointError, closedness_probe,
                             cloud_graph_sampler, graph_sample,
                             intermediate_closure, oracle_graph_sampler,
                             oracle_membership, phi_sample, psi_sample,
                             vfr_feasible)
from moblab.parametric import GridSpec

PI = math.pi


def sine_grid(step=PI / 400):
    return GridSpec([(0.0, 2 * PI, step)])


def ring_grid(step=0.05):
    return GridSpec([(-1.5, 2.0, step), (-1.5, 2.0, step)])


def diag_grid(step=PI / 100):
    return GridSpec([(0.0, 2 * PI, step), (0.0, 2 * PI, step)])


class TestPsiSample:
    def test_sine_eff_excludes_pi_includes_3pi2(self):
        p = catalog_get("ex_3_1").problem
        ps = psi_sample(p, 0.0, sine_grid(), "eff")
        ts = [y[0] for y in ps.points]
        assert not any(abs(t - PI) < 1e-15 for t in ts)
        assert any(abs(t - 1.5 * PI) < 1e-15 for t in ts)
        for t in ts:
            assert abs(t) < 1e-12 or PI < t <= 1.5 * PI + 1e-12

    def test_sine_weff_includes_pi(self):
        p = catalog_get("ex_3_1").problem
        ps = psi_sample(p, 0.0, sine_grid(), "weff")
        ts = [y[0] for y in ps.points]
        assert any(abs(t - PI) < 1e-15 for t in ts)
        step = PI / 400
        for t in ts:
            assert abs(t) < 1e-12 or PI - step <= t <= 1.5 * PI + step

    def test_halfplane_weff_empty_by_oracle(self):
        p = catalog_get("ex_3_2").problem
        ps = psi_sample(p, -1.0, GridSpec([(-2, 2, 0.5), (-2, 2, 0.5)]), "weff")
        assert ps.points == []
        assert any("truncation_artifact" in f for f in ps.flags)


class TestPhiSample:
    def test_sine_images(self):
        p = catalog_get("ex_3_1").problem
        fr = phi_sample(p, 0.0, sine_grid(), "eff")
        for z in fr.points:
            assert abs(z[0] - math.sin(z[1])) <= 1e-12
            assert abs(z[1]) < 1e-12 or PI < z[1] <= 1.5 * PI + 1e-12

    def test_tilting_segment_weak_frontier_positive_x(self):
        p = catalog_get("ex_4_2").problem
        fr = phi_sample(p, 1.0, GridSpec([(0.0, 1.0, 0.01)]), "weff")
        assert fr.points == [(0.0, 0.0)]

    def test_tilting_segment_weak_frontier_negative_x(self):
        p = catalog_get("ex_4_2").problem
        fr = phi_sample(p, -1.0, GridSpec([(0.0, 1.0, 0.01)]), "weff")
        # whole segment conv{(0,0), (-1,1)} on the grid
        assert len(fr.points) == 101
        for z in fr.points:
            assert abs(z[0] + z[1]) <= 1e-12 and 0 <= z[1] <= 1


class TestGraphSample:
    def test_halfplane_weff_graph_positive_axis_only(self):
        p = catalog_get("ex_3_2").problem
        g = GridSpec([(-2, 2, 0.25), (-2, 2, 0.25)])
        cloud = graph_sample(p, [(-1.0,), (0.0,), (1.0,)], g, "weff")
        xs = {x[0] for x, _, _ in cloud.records}
        assert xs == {0.0, 1.0}
        for x, y, _ in cloud.records:
            assert abs(y[0] + x[0] * y[1]) <= 1e-9

    def test_halfplane_eff_graph(self):
        p = catalog_get("ex_3_2").problem
        g = GridSpec([(-2, 2, 0.25), (-2, 2, 0.25)])
        cloud = graph_sample(p, [(-1.0,), (0.0,), (1.0,)], g, "eff")
        assert {x[0] for x, _, _ in cloud.records} == {1.0}

    def test_sine_graph_is_x_independent(self):
        p = catalog_get("ex_3_1").problem
        g = sine_grid(PI / 50)
        cloud = graph_sample(p, [(-0.5,), (0.5,)], g, "eff")
        at_a = sorted(y for x, y, _ in cloud.records if x == (-0.5,))
        at_b = sorted(y for x, y, _ in cloud.records if x == (0.5,))
        assert at_a == at_b

    def test_cloud_round_trips(self):
        p = catalog_get("ex_3_1").problem
        cloud = graph_sample(p, [(0.0,)], sine_grid(PI / 25), "eff")
        text = cloud.to_csv()
        assert text.splitlines()[0] == "x1,y1,z1,z2,concept"
        assert len(text.splitlines()) == len(cloud.records) + 1
        assert cloud.to_json() == cloud.to_json()


class TestIntermediateClosure:
    def test_diagonal_with_special_point(self):
        # closure first, pull back second: the off-diagonal point joins
        p = catalog_get("ex_3_17").problem
        cloud = intermediate_closure(p, [(0.0,)], diag_grid())
        ys = {y for _, y, _ in cloud.records}
        assert (0.0, PI) in ys
        # and the closure of the strict graph does not contain it
        eff = graph_sample(p, [(0.0,)], diag_grid(), "eff")
        assert one_sided_inf([(0.0, PI)], [y for _, y, _ in eff.records]) > 1.0

    def test_sine_intermediate_matches_weak_set(self):
        p = catalog_get("ex_3_1").problem
        grid = sine_grid(PI / 200)
        cloud = intermediate_closure(p, [(0.0,)], grid)
        ts = sorted(y[0] for _, y, _ in cloud.records)
        assert any(abs(t - PI) < 1e-15 for t in ts)
        eps = cloud.grid_meta["eps"][-1] + 1e-12
        for t in ts:
            assert abs(t) <= eps or PI - eps <= t <= 1.5 * PI + eps

    def test_ring_intermediate_keeps_arc_and_corner(self):
        p = catalog_get("ex_3_18").problem
        cloud = intermediate_closure(p, [(1.0,)], ring_grid(0.05))
        ys = [y for _, y, _ in cloud.records]
        assert (-1.0, 1.0) in set(ys)
        # the cloud hugs the closed-form intermediate set away from the
        # arc/strip junction: radial deviation of an eps-tube around a
        # one-step staircase is at most sqrt(2) * (eps + step)
        eps = cloud.grid_meta["eps"][-1]
        bound = math.sqrt(2) * (eps + 0.05) + 1e-9
        far = [y for y in ys if y[0] > 0.5]
        assert far
        for y in far:
            assert abs(math.hypot(*y) - 1.0) <= bound

    def test_level_validation(self):
        p = catalog_get("ex_3_1").problem
        with pytest.raises(Exception):
            intermediate_closure(p, [(0.0,)], sine_grid(), refinement_levels=1)


class TestClosednessProbe:
    def probe(self, cid, key, point):
        p = catalog_get(cid).problem
        return closedness_probe(oracle_membership(p, key),
                                oracle_graph_sampler(p, key), point)

    def test_sine_strict_graph_open_at_pi(self):
        assert self.probe("ex_3_1", "psi", (0.0, PI)).verdict == \
            "missing_limit_point"

    def test_sine_weak_graph_closed_at_pi(self):
        assert self.probe("ex_3_1", "psi_w", (0.0, PI)).verdict == "closed_here"

    def test_halfplane_strict_graph_open_at_origin_slice(self):
        assert self.probe("ex_3_2", "psi", (0.0, 0.0, 1.0)).verdict == \
            "missing_limit_point"

    def test_all_catalog_probe_cases(self):
        for cid in ("ex_2_1", "ex_3_1", "ex_3_2", "ex_3_17", "ex_3_18",
                    "ex_4_1", "ex_4_2"):
            p = catalog_get(cid).problem
            for case in p.probe_cases:
                v = self.probe(cid, case.concept, case.point)
                assert v.verdict == case.expected, (cid, case)

    def test_witness_sequence_converges(self):
        v = self.probe("ex_3_1", "psi", (0.0, PI))
        dists = [max(abs(a - b) for a, b in zip(w, (0.0, PI)))
                 for w in v.witnesses]
        assert all(d <= r * (1 + 1e-9) for d, r in zip(dists, v.radii))

    def test_cloud_sampler_is_resolution_limited(self):
        p = catalog_get("ex_3_1").problem
        cloud = graph_sample(p, [(0.0,)], sine_grid(PI / 50), "eff")
        sampler = cloud_graph_sampler(cloud)
        v = closedness_probe(oracle_membership(p, "psi"), sampler, (0.0, PI))
        assert v.verdict == "inconclusive"

    def test_schedule_validation(self):
        p = catalog_get("ex_3_1").problem
        with pytest.raises(Exception):
            closedness_probe(oracle_membership(p, "psi"),
                             oracle_graph_sampler(p, "psi"), (0.0, PI),
                             radius_schedule=[1.0, 1.0])


class TestPhiMinusConeClosednessAgreement:
    def test_probe_verdicts_agree_for_locally_bounded_feasible_set(self):
        # frontier graph and its cone enlargement are closed at the same
        # probe points when the feasible mapping is locally bounded
        p = catalog_get("ex_3_1").problem
        for pt in [(0.0, 0.0, PI), (0.0, -1.0, 1.5 * PI)]:
            va = closedness_probe(oracle_membership(p, "phi"),
                                  oracle_graph_sampler(p, "phi"), pt)
            vb = closedness_probe(oracle_membership(p, "phi_minus_C"),
                                  oracle_graph_sampler(p, "phi_minus_C"), pt)
            assert va.verdict == vb.verdict, pt
            vc = closedness_probe(oracle_membership(p, "phi_w"),
                                  oracle_graph_sampler(p, "phi_w"), pt)
            vd = closedness_probe(oracle_membership(p, "phi_w_minus_C"),
                                  oracle_graph_sampler(p, "phi_w_minus_C"), pt)
            assert vc.verdict == vd.verdict, pt


class TestVfrFeasible:
    def test_ring_reference_point_diverges_across_bar_variants(self):
        p = catalog_get("ex_3_19").problem
        assert not vfr_feasible(p, 1.0, (-0.25, 1.0), "Ebar")
        assert vfr_feasible(p, 1.0, (-0.25, 1.0), "Ebar_minusC")

    def test_sine_strict_variant_accepts_closed_end(self):
        p = catalog_get("ex_3_1").problem
        assert vfr_feasible(p, 0.0, (1.5 * PI,), "E")
        assert vfr_feasible(p, 0.0, (1.5 * PI,), "E", grid=sine_grid(),
                            route="grid", tol=0.0)

    def test_infeasible_point_is_a_distinct_error(self):
        p = catalog_get("ex_3_1").problem
        with pytest.raises(InfeasiblePointError):
            vfr_feasible(p, 0.0, (7.0,), "E")

    def test_unknown_variant(self):
        p = catalog_get("ex_3_1").problem
        with pytest.raises(Exception):
            vfr_feasible(p, 0.0, (0.0,), "Z")

    def test_plain_equals_minusc_exactly_on_grids(self, rng):
        # the cone enlargement changes nothing for the strict and weak
        # variants: exact agreement on sampled feasible grid points
        p = catalog_get("ex_3_18").problem
        grid = ring_grid(0.1)
        from moblab.parametric import feasible_array
        for x in ((1.0,), (1.5,)):
            ys = feasible_array(p, x, grid)
            take = rng.choice(len(ys), size=min(150, len(ys)), replace=False)
            for i in take:
                y = tuple(ys[i])
                for a, b in (("E", "E_minusC"), ("Ew", "Ew_minusC")):
                    va = vfr_feasible(p, x, y, a, grid=grid, route="grid", tol=0.0)
                    vb = vfr_feasible(p, x, y, b, grid=grid, route="grid", tol=0.0)
                    assert va == vb, (x, y, a)

    def test_grid_equivalence_with_psi_sample(self):
        # VFR feasibility through the frontier equals membership in the
        # efficiency sample, pointwise and exactly, on the grid
        p = catalog_get("ex_3_1").problem
        grid = sine_grid(PI / 40)
        eff = set(psi_sample(p, 0.0, grid, "eff").points)
        weff = set(psi_sample(p, 0.0, grid, "weff").points)
        from moblab.parametric import feasible_sample
        for y in feasible_sample(p, 0.0, grid):
            assert vfr_feasible(p, 0.0, y, "E", grid=grid, route="grid",
                                tol=0.0) == (y in eff)
            assert vfr_feasible(p, 0.0, y, "Ew", grid=grid, route="grid",
                                tol=0.0) == (y in weff)


class TestInclusionChain:
    def test_eff_bar_weff_up_to_one_step(self):
        p = catalog_get("ex_3_18").problem
        grid = ring_grid(0.1)
        xs = [(1.0,), (1.5,)]
        eff = graph_sample(p, xs, grid, "eff")
        bar = intermediate_closure(p, xs, grid)
        weff = graph_sample(p, xs, grid, "weff")
        def pts(c):
            return [x + y for x, y, _ in c.records]
        # strict records sit inside the intermediate tube exactly; the tube
        # itself is eps = 2*step wide, so that is its distance bound to the
        # weak cloud
        eps = bar.grid_meta["eps"][-1]
        assert one_sided_inf(pts(eff), pts(bar)) <= 0.1 + 1e-9
        assert one_sided_inf(pts(bar), pts(weff)) <= eps + 1e-9

    def test_bar_cloud_probes_closed_at_catalog_probe_points(self):
        p = catalog_get("ex_3_18").problem
        member = oracle_membership(p, "psi_bar")
        sampler = oracle_graph_sampler(p, "psi_bar")
        for case in p.probe_cases:
            if case.concept != "psi_bar":
                continue
            v = closedness_probe(member, sampler, case.point)
            assert v.verdict == "closed_here"
