import json
import math

import numpy as np
import pytest

from conftest import hausdorff_inf
from moblab.catalog import CatalogError, catalog_get
from moblab.mappings import psi_sample
from moblab.parametric import (ExprFunction, FeasibilityDescriptor, GridSpec,
                               ParametricError, feasible_sample,
                               problem_from_spec)

PI = math.pi


class TestFeasibleSample:
    def test_interval_grid_is_x_independent(self):
        problem = catalog_get("ex_3_1").problem
        got = feasible_sample(problem, 0.0, GridSpec([(0.0, 2 * PI, PI / 4)]))
        expected = [k * PI / 4 for k in range(9)]
        # probe points pi and 3pi/2 coincide with grid nodes and deduplicate
        assert len(got) == 9
        for v in expected:
            assert any(abs(t[0] - v) <= 1e-9 for t in got)

    def test_polyhedral_filtering_on_unit_grid(self):
        problem = catalog_get("ex_4_1").problem
        got = set(feasible_sample(problem, 0.0,
                                  GridSpec([(-2.0, 2.0, 1.0), (-2.0, 2.0, 1.0)])))
        expected = {(float(a), float(b))
                    for a in range(-2, 3) for b in range(-2, 3)
                    if a + 2 * b >= 0 and 2 * a + b >= 0 and a <= 2 and b <= 2}
        assert {(round(a, 9), round(b, 9)) for a, b in got} >= expected
        # probe points are the only extras
        assert got - {(a, b) for a, b in got if (a, b) in expected} <= \
            set(map(tuple, problem.probe_points))

    def test_oracle_filtering_ring_with_strip(self):
        problem = catalog_get("ex_3_18").problem
        grid = GridSpec([(-1.5, 2.0, 0.25), (-1.5, 2.0, 0.25)])
        got = feasible_sample(problem, 1.0, grid)
        for y in got:
            in_ring = y[0] >= -1e-9 and y[1] >= -1e-9 and \
                y[0] ** 2 + y[1] ** 2 >= 1 - 1e-9
            in_strip = -1 - 1e-9 <= y[0] <= 1e-9 and y[1] >= 1 - 1e-9
            assert in_ring or in_strip

    def test_determinism(self):
        problem = catalog_get("ex_3_18").problem
        grid = GridSpec([(-1.5, 2.0, 0.25), (-1.5, 2.0, 0.25)])
        assert feasible_sample(problem, 1.0, grid) == \
            feasible_sample(problem, 1.0, grid)

    def test_unbounded_polyhedron_without_box_raises(self):
        gamma = FeasibilityDescriptor("polyhedral", A=[[0]], B=[[-1]], d=[0])
        with pytest.raises(ParametricError):
            gamma.box_for((0.0,))

    def test_empty_feasible_grid_is_empty_list(self):
        problem = catalog_get("ex_3_18").problem
        # a box far inside the excluded disc
        grid = GridSpec([(0.1, 0.4, 0.1), (0.1, 0.4, 0.1)])
        assert feasible_sample(problem, 1.0, grid) == []


class TestGridSpec:
    def test_probe_points_force_included(self):
        g = GridSpec([(0.0, 1.0, 0.3)], probe_points=[(0.5,)])
        pts = [tuple(p) for p in g.points()]
        assert (0.5,) in pts

    def test_validation(self):
        with pytest.raises(ParametricError):
            GridSpec([(0.0, 1.0, 0.0)])
        with pytest.raises(ParametricError):
            GridSpec([(0.0, 1.0, 0.1)], probe_points=[(2.0,)])

    def test_refine_and_coarsen(self):
        g = GridSpec([(0.0, 1.0, 0.25)])
        assert g.refined(2).axes[0][2] == 0.125
        assert g.coarsened(2).axes[0][2] == 0.5


class TestCatalog:
    def test_unknown_id_lists_valid_ids(self):
        with pytest.raises(CatalogError) as err:
            catalog_get("nope")
        assert "ex_3_1" in str(err.value)

    def test_sine_height_entry(self):
        e = catalog_get("ex_3_1")
        p = e.problem
        assert (p.n, p.m, p.q) == (1, 1, 2)
        assert p.f((0.0,), (PI / 2,)) == pytest.approx((1.0, PI / 2))
        assert p.oracles["psi"]((0.0,), (1.5 * PI,))
        assert not p.oracles["psi"]((0.0,), (PI,))
        assert p.oracles["psi_w"]((0.0,), (PI,))

    def test_linear_entry_data(self):
        e = catalog_get("ex_4_1")
        assert e.linear is not None
        p = e.problem
        assert p.gamma.kind == "polyhedral"
        assert p.oracles["psi"]((0.0,), (0.0, 0.0))
        assert p.oracles["psi"]((0.0,), (-1.0, 2.0))
        assert not p.oracles["psi"]((0.0,), (2.0, 2.0))

    def test_ring_bilevel_entry(self):
        e = catalog_get("ex_3_18")
        assert e.bilevel is not None and e.bilevel.p == 1
        assert e.bilevel.F((1.0,), (-0.25, 1.0)) == (1.0,)
        alias = catalog_get("ex_3_19")
        assert alias.problem is e.problem

    @pytest.mark.parametrize("cid,x,concept,step", [
        ("ex_3_1", 0.0, "eff", PI / 400),
        ("ex_3_1", 0.0, "weff", PI / 400),
        ("ex_4_1", 0.0, "eff", 0.25),
        ("ex_4_2", -1.0, "weff", 0.01),
        ("ex_4_2", 1.0, "weff", 0.01),
    ])
    def test_oracle_agrees_with_grid(self, cid, x, concept, step):
        """Grid efficiency matches the analytic oracle within one step:
        every grid point classified efficient satisfies the oracle within one
        step, and every oracle point in the box has a grid representative."""
        problem = catalog_get(cid).problem
        box = problem.gamma.box_for((x,) if problem.n == 1 else x)
        grid = GridSpec([(lo, hi, step) for lo, hi in box])
        ps = psi_sample(problem, x, grid, concept)
        key = "psi" if concept == "eff" else "psi_w"
        oracle = problem.oracles[key]
        ys = feasible_sample(problem, x, grid)
        oracle_pts = [y for y in ys if oracle((x,), y)]
        assert oracle_pts, "oracle set should meet the grid"
        assert hausdorff_inf(ps.points, oracle_pts) <= step + 1e-9

    def test_probe_points_classified_exactly(self):
        problem = catalog_get("ex_3_1").problem
        grid = GridSpec([(0.0, 2 * PI, PI / 100)])
        eff = psi_sample(problem, 0.0, grid, "eff")
        weff = psi_sample(problem, 0.0, grid, "weff")
        assert not any(abs(t[0] - PI) < 1e-15 for t in eff.points)
        assert any(abs(t[0] - PI) < 1e-15 for t in weff.points)
        assert any(abs(t[0] - 1.5 * PI) < 1e-15 for t in eff.points)


class TestExpressions:
    def test_grammar(self):
        f = ExprFunction(["sin(y1) + x1^2", "y1 / 2 - cos(x1)"], 1, 1)
        got = f((2.0,), (PI,))
        assert got[0] == pytest.approx(math.sin(PI) + 4.0)
        assert got[1] == pytest.approx(PI / 2 - math.cos(2.0))

    def test_batch_matches_scalar(self):
        f = ExprFunction(["sin(y1)", "y2 * x"], 1, 2)
        ys = np.asarray([[0.1, 0.2], [0.3, 0.4]])
        batch = f.batch((2.0,), ys)
        for row, y in zip(batch, ys):
            assert tuple(row) == pytest.approx(f((2.0,), tuple(y)))

    def test_rejects_unsafe_syntax(self):
        for bad in ["__import__('os')", "y1.denominator", "lambda: 1",
                    "exp(y1)", "unknown_name"]:
            with pytest.raises(ParametricError):
                ExprFunction([bad], 1, 1)


class TestProblemSpecJson:
    SPEC = {
        "name": "inline-sine",
        "dims": {"n": 1, "m": 1, "q": 2},
        "cone": {"orthant": 2},
        "objective": ["sin(y)", "y"],
        "feasibility": {"kind": "box", "bounds": [[0.0, 6.283185307179586]]},
        "x_box": [[-1.0, 1.0]],
        "probe_points": [[0.0], [3.141592653589793]],
        "dominance_tol": 1e-12,
    }

    def test_round_trip_matches_catalog_behaviour(self):
        problem = problem_from_spec(json.dumps(self.SPEC))
        reference = catalog_get("ex_3_1").problem
        grid = GridSpec([(0.0, 2 * PI, PI / 50)])
        got = psi_sample(problem, 0.0, grid, "eff").points
        exp = psi_sample(reference, 0.0, grid, "eff").points
        assert got == exp

    def test_inequality_feasibility(self):
        spec = dict(self.SPEC)
        spec["feasibility"] = {"kind": "inequalities",
                               "exprs": ["y - 3.0"], "box": [[0.0, 10.0]]}
        problem = problem_from_spec(spec)
        pts = feasible_sample(problem, 0.0, GridSpec([(0.0, 10.0, 1.0)]))
        assert max(t[0] for t in pts) <= 3.0

    def test_missing_key_reported(self):
        with pytest.raises(ParametricError) as err:
            problem_from_spec({"dims": {"n": 1, "m": 1, "q": 2}})
        assert "missing key" in str(err.value)
