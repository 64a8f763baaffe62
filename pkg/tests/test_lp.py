from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from moblab.scalarize import LinearProgram, lp_solve
from moblab.simplex import solve_lp


def vertices_of_four_vertex_polyhedron():
    # brute enumeration from the constraint pairs of
    # {-y1-2y2<=0, -2y1-y2<=0, y1<=2, y2<=2}
    return [(F(0), F(0)), (F(-1), F(2)), (F(2), F(-1)), (F(2), F(2))]


class TestExamples:
    def test_vertex_optimum(self):
        # oracle: minimize -y1-y2 over the enumerated vertices
        expected = min(-a - b for a, b in vertices_of_four_vertex_polyhedron())
        lp = LinearProgram([-1, -1], [[-1, -2], [-2, -1], [1, 0], [0, 1]],
                           ["<="] * 4, [0, 0, 2, 2])
        res = lp_solve(lp)
        assert res.status == "optimal"
        assert res.value == expected == -4
        assert res.x == (F(2), F(2))

    def test_infeasible(self):
        lp = LinearProgram([0], [[1], [1]], ["<=", ">="], [-1, 1])
        assert lp_solve(lp).status == "infeasible"

    def test_unbounded(self):
        lp = LinearProgram([-1], [[1]], [">="], [0])
        assert lp_solve(lp).status == "unbounded"


class TestDuality:
    def test_duals_reported_for_active_rows(self):
        res = solve_lp([-1, -1], [[-1, -2], [-2, -1], [1, 0], [0, 1]],
                       ["<="] * 4, [0, 0, 2, 2], [False, False])
        assert res.y == (F(0), F(0), F(-1), F(-1))

    def test_equality_rows_and_redundancy(self):
        res = solve_lp([1], [[1], [1]], ["==", "=="], [1, 1], [True])
        assert res.status == "optimal" and res.value == 1

    @given(st.data())
    @settings(max_examples=150, deadline=None)
    def test_random_lps_pass_strong_duality_self_check(self, data):
        n = data.draw(st.integers(1, 4))
        m = data.draw(st.integers(1, 5))
        c = [F(data.draw(st.integers(-5, 5)), data.draw(st.integers(1, 3)))
             for _ in range(n)]
        rows = [[F(data.draw(st.integers(-4, 4))) for _ in range(n)]
                for _ in range(m)]
        senses = [data.draw(st.sampled_from(["<=", ">=", "=="]))
                  for _ in range(m)]
        rhs = [F(data.draw(st.integers(-6, 6))) for _ in range(m)]
        nonneg = [data.draw(st.booleans()) for _ in range(n)]
        # the engine raises if any optimal solve has a duality gap
        res = solve_lp(c, rows, senses, rhs, nonneg)
        if res.status == "optimal":
            assert sum(yi * bi for yi, bi in zip(res.y, rhs)) == res.value


class TestJson:
    def test_round_trip_with_rational_strings(self):
        lp = LinearProgram(["3/7", -1], [["1/2", 2]], ["<="], ["5/3"],
                           [True, False])
        back = LinearProgram.from_json(lp.to_json())
        assert back.c == lp.c and back.rows == lp.rows and back.rhs == lp.rhs
        assert lp_solve(back).status == lp_solve(lp).status

    def test_dimension_validation(self):
        with pytest.raises(Exception):
            LinearProgram([1, 2], [[1]], ["<="], [0])
