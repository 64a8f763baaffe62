import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moblab.cones import (ConeError, OrderingCone, canonical_ray,
                          cone_contains_exact,
                          cone_generators_from_inequalities)

ORTHANT2 = OrderingCone.orthant(2)
SKEWED = OrderingCone(2, [(1, 2), (2, 1)])


class TestContains:
    def test_apex_belongs_to_every_closed_cone(self):
        assert ORTHANT2.contains((0, 0), "closed")
        assert SKEWED.contains((0, 0), "closed")

    def test_boundary_point_not_interior(self):
        assert not ORTHANT2.contains((0, 1), "interior")
        assert ORTHANT2.contains((0, 1), "closed")

    def test_skewed_interior_by_direct_substitution(self):
        # both defining inequalities -z1+2z2 >= 0 and 2z1-z2 >= 0 hold
        # strictly at (1, 1)
        z = (1, 1)
        assert -z[0] + 2 * z[1] > 0 and 2 * z[0] - z[1] > 0
        assert SKEWED.contains(z, "interior")

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ConeError):
            ORTHANT2.contains((1, 2, 3))

    def test_interior_implies_closed_on_samples(self, rng):
        for _ in range(200):
            z = tuple(rng.normal(size=2))
            for cone in (ORTHANT2, SKEWED):
                if cone.contains(z, "interior"):
                    assert cone.contains(z, "closed")


class TestDualCone:
    def test_orthant_self_dual(self):
        d = ORTHANT2.dual_cone()
        assert set(d.generators) == set(ORTHANT2.generators)
        o3 = OrderingCone.orthant(3)
        assert set(o3.dual_cone().generators) == set(o3.generators)

    def test_skewed_dual_by_definition(self):
        # {lam : lam1 + 2 lam2 >= 0, 2 lam1 + lam2 >= 0}
        d = SKEWED.dual_cone()
        assert set(d.dual_generators) == {(F(1), F(2)), (F(2), F(1))}
        for lam in d.generators:
            assert lam[0] + 2 * lam[1] >= 0 and 2 * lam[0] + lam[1] >= 0

    def test_double_dual_round_trip_on_samples(self, rng):
        dd = SKEWED.dual_cone().dual_cone()
        for _ in range(200):
            z = tuple(rng.uniform(-2, 2, size=2))
            assert dd.contains(z) == SKEWED.contains(z)

    def test_generator_and_inequality_reps_agree(self, rng):
        for cone in (ORTHANT2, SKEWED):
            for _ in range(300):
                z = tuple(F(int(t)) for t in rng.integers(-5, 6, size=2))
                by_ineq = cone.contains(z)
                by_gens = cone_contains_exact(cone.generators, 2, z)
                assert by_ineq == by_gens


class TestStrictDual:
    def test_positive_on_basis(self):
        assert ORTHANT2.strict_dual_contains((1, 1))

    def test_boundary_weight_rejected(self):
        assert not ORTHANT2.strict_dual_contains((1, 0))

    def test_negative_argument_rejected(self):
        assert not ORTHANT2.strict_dual_contains((-1, -2))

    def test_membership_implies_dual_cone_and_positivity(self, rng):
        dual = SKEWED.dual_cone()
        gens = np.asarray([[float(t) for t in g] for g in SKEWED.generators])
        for _ in range(100):
            zs = tuple(rng.normal(size=2))
            if SKEWED.strict_dual_contains(zs):
                assert dual.contains(zs, "closed", tol=1e-12)
                for _ in range(10):
                    w = rng.uniform(0, 1, size=2)
                    v = w @ gens
                    v = v / np.linalg.norm(v)
                    assert float(np.dot(zs, v)) > 0


class TestPointedness:
    def test_unpointed_rejected(self):
        with pytest.raises(ConeError):
            OrderingCone(2, [(1, 0), (-1, 0), (0, 1)])

    def test_no_interior_rejected(self):
        with pytest.raises(ConeError):
            OrderingCone(2, [(1, 1)])

    def test_negated_members_stay_out(self, rng):
        gens = np.asarray([[float(t) for t in g] for g in SKEWED.generators])
        for _ in range(1000):
            w = rng.uniform(0, 1, size=2)
            if w.sum() == 0:
                continue
            v = tuple(-(w @ gens))
            assert not SKEWED.contains(v, "closed")


class TestDualSphereGrid:
    def test_orthant_three_points(self):
        got = ORTHANT2.dual_sphere_grid(3)
        s = math.sqrt(2) / 2
        assert got[0] == (1.0, 0.0) and got[-1] == (0.0, 1.0)
        assert got[1] == pytest.approx((s, s), abs=1e-15)

    def test_orthant_two_points(self):
        assert ORTHANT2.dual_sphere_grid(2) == [(1.0, 0.0), (0.0, 1.0)]

    def test_skewed_extreme_rays(self):
        got = SKEWED.dual_sphere_grid(2)
        exp = {(2 / math.sqrt(5), -1 / math.sqrt(5)),
               (-1 / math.sqrt(5), 2 / math.sqrt(5))}
        assert {tuple(round(t, 12) for t in v) for v in got} == \
               {tuple(round(t, 12) for t in v) for v in exp}

    @pytest.mark.parametrize("norm,expected", [("2", 2.0), ("1", 1.0), ("inf", 1.0)])
    def test_norm_variants(self, norm, expected):
        for v in ORTHANT2.dual_sphere_grid(7, norm=norm):
            if norm == "2":
                assert abs(math.hypot(*v) - 1.0) <= 1e-12
            elif norm == "1":
                assert abs(sum(abs(t) for t in v) - 1.0) <= 1e-12
            else:
                assert abs(max(abs(t) for t in v) - 1.0) <= 1e-12

    @pytest.mark.parametrize("cone", [ORTHANT2, SKEWED, OrderingCone.orthant(3)])
    def test_membership_and_unit_norm(self, cone):
        dual = cone.dual_cone() if cone.dim <= 3 else None
        for v in cone.dual_sphere_grid(9):
            assert abs(math.sqrt(sum(t * t for t in v)) - 1.0) <= 1e-12
            assert dual.contains(v, "closed", tol=1e-12)

    def test_resolution_validation(self):
        with pytest.raises(ConeError):
            ORTHANT2.dual_sphere_grid(1)


class TestSerialization:
    def test_orthant_shorthand(self):
        assert ORTHANT2.to_json() == {"orthant": 2}
        assert OrderingCone.from_json({"orthant": 3}) == OrderingCone.orthant(3)

    def test_generator_form_round_trip(self):
        data = SKEWED.to_json()
        assert data["dim"] == 2
        assert OrderingCone.from_json(data) == SKEWED

    def test_rational_strings(self):
        cone = OrderingCone(2, [("1/3", 1), (1, "1/7")])
        back = OrderingCone.from_json(cone.to_json())
        assert back == cone


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
                min_size=1, max_size=4))
@settings(max_examples=200, deadline=None)
def test_inequality_generators_satisfy_their_rows(rows):
    gens = cone_generators_from_inequalities(rows, 2)
    for g in gens:
        for row in rows:
            assert row[0] * g[0] + row[1] * g[1] >= 0


def test_canonical_ray_scales_to_primitive_integers():
    assert canonical_ray((F(2, 3), F(-4, 3))) == (F(1), F(-2))
    with pytest.raises(ConeError):
        canonical_ray((F(0), F(0)))


def test_high_dimension_restricted_to_orthant():
    OrderingCone.orthant(4)  # allowed
    with pytest.raises(ConeError):
        OrderingCone(4, [(1, 2, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
