import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chain_fk
from pickarm.errors import DegenerateAtShoulder, TriangleInequalityViolated, Unreachable
from pickarm.kinematics import (
    DEFAULT_GEOMETRY,
    ArmGeometry,
    CartesianPoint,
    JointAngles,
    forward_kinematics,
    inverse_kinematics,
    law_of_cosines_angles,
    reach_parameters,
    shoulder_offset_angle,
    workspace_contains,
)

GEOM = DEFAULT_GEOMETRY
A, B, C = GEOM.a, GEOM.b, GEOM.c

# Frozen from tests/oracles.py: reach_parameters_exact(10, 10, 2, 14.9, 14.6, 5.4)
REACH_10_10_2 = (14.142135623730951, 14.545102268461367, 7.576777252296205, -0.2359385758953321)
# Frozen from tests/oracles.py: grid_ik((10, 10, 2), 14.9, 14.6, 5.4); residual 2.4e-6 cm
GRID_IK_10_10_2 = (0.7853981633974483, 0.8014057992417777, 1.0310114915695383)


def reachable_points(draw_r=st.floats(0.31, 29.49)):
    return st.builds(
        lambda r, el, az: CartesianPoint(
            r * math.cos(el) * math.sin(az), r * math.cos(el) * math.cos(az), C + r * math.sin(el)
        ),
        draw_r,
        st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3),
        st.floats(-math.pi + 1e-3, math.pi - 1e-3),
    )


class TestLawOfCosines:
    def test_equilateral(self):
        t = law_of_cosines_angles(1, 1, 1)
        for v in (t.alpha, t.beta, t.gamma):
            assert v == pytest.approx(math.pi / 3, abs=1e-15)

    def test_345(self):
        t = law_of_cosines_angles(3, 4, 5)
        assert t.alpha == pytest.approx(math.acos(0.6), abs=1e-15)
        assert abs(t.beta - math.pi / 2) < 1e-12
        assert t.gamma == pytest.approx(math.acos(0.8), abs=1e-15)

    @pytest.mark.parametrize("sides", [(1, 1, 2), (1, 5, 1), (0, 1, 1), (10, 1, 1)])
    def test_degenerate(self, sides):
        with pytest.raises(TriangleInequalityViolated):
            law_of_cosines_angles(*sides)

    def test_matches_high_precision_acos(self):
        from oracles import triangle_angle_deg_exact

        A_, B_, D_ = 7.3, 4.1, 9.9
        t = law_of_cosines_angles(A_, B_, D_)
        assert t.alpha == pytest.approx(triangle_angle_deg_exact(B_, A_, D_), abs=1e-14)
        assert t.beta == pytest.approx(triangle_angle_deg_exact(D_, A_, B_), abs=1e-14)
        assert t.gamma == pytest.approx(triangle_angle_deg_exact(A_, B_, D_), abs=1e-14)

    @given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.001, 0.999))
    def test_angle_sum(self, x, y, frac):
        # third side strictly between |x - y| and x + y
        lo, hi = abs(x - y), x + y
        d = lo + frac * (hi - lo)
        if not (lo < d < hi):
            return
        try:
            t = law_of_cosines_angles(x, y, d)
        except TriangleInequalityViolated:
            return
        assert abs(t.alpha + t.beta + t.gamma - math.pi) < 1e-9
        assert all(0 < v < math.pi for v in (t.alpha, t.beta, t.gamma))


class TestReachParameters:
    def test_straight_reach(self):
        rp = reach_parameters(CartesianPoint(0, A + B, C), GEOM)
        assert rp.rho == A + B and rp.r == A + B and rp.g == 0.0

    def test_shoulder_is_degenerate(self):
        with pytest.raises(DegenerateAtShoulder):
            reach_parameters(CartesianPoint(0, 0, C), GEOM)

    def test_formula_reevaluation(self):
        rp = reach_parameters(CartesianPoint(10, 10, 2), GEOM)
        for got, want in zip((rp.rho, rp.r, rp.u, rp.g), REACH_10_10_2):
            assert got == pytest.approx(want, rel=1e-14, abs=1e-15)

    def test_straight_up_elevation(self):
        assert reach_parameters(CartesianPoint(0, 0, C + 10), GEOM).g == pytest.approx(math.pi / 2)

    @given(st.floats(abs(A - B), A + B))
    def test_u_consistency(self, r):
        rp = reach_parameters(CartesianPoint(0, r, C), GEOM)
        assert -A <= rp.u <= A + 1e-9
        assert A * math.cos(shoulder_offset_angle(rp, GEOM)) == pytest.approx(
            max(-A, min(A, rp.u)), abs=1e-9
        )


class TestInverseKinematics:
    def test_fully_extended(self):
        j = inverse_kinematics(CartesianPoint(0, A + B, C), GEOM)
        assert (j.theta0, j.theta1, j.theta2, j.theta3) == (0.0, 0.0, math.pi, 0.0)

    def test_unreachable(self):
        with pytest.raises(Unreachable) as exc:
            inverse_kinematics(CartesianPoint(0, 100, 0), GEOM)
        assert exc.value.r > A + B

    def test_too_close_is_unreachable(self):
        with pytest.raises(Unreachable):
            inverse_kinematics(CartesianPoint(0, 0.1, C), GEOM)

    def test_degenerate_propagates(self):
        with pytest.raises(DegenerateAtShoulder):
            inverse_kinematics(CartesianPoint(0, 0, C), GEOM)

    def test_matches_grid_oracle(self):
        p = CartesianPoint(10, 10, 2)
        j = inverse_kinematics(p, GEOM)
        for got, want in zip((j.theta0, j.theta1, j.theta2), GRID_IK_10_10_2):
            assert got == pytest.approx(want, abs=1e-5)
        assert forward_kinematics(j, GEOM).distance_to(p) < 1e-6

    def test_directly_overhead(self):
        j = inverse_kinematics(CartesianPoint(0, 0, C + 20), GEOM)
        assert j.theta0 == 0.0
        assert forward_kinematics(j, GEOM).distance_to(CartesianPoint(0, 0, C + 20)) < 1e-9

    def test_behind_base_yaw_is_pi(self):
        j = inverse_kinematics(CartesianPoint(-0.0, -20, C), GEOM)
        assert j.theta0 == pytest.approx(math.pi)
        assert -math.pi < j.theta0 <= math.pi

    def test_theta3_is_wrist_sum(self):
        j = inverse_kinematics(CartesianPoint(5, 15, 9), GEOM)
        assert j.theta3 == j.theta1 + j.theta2 - math.pi

    @settings(max_examples=300)
    @given(reachable_points())
    def test_round_trip(self, p):
        j = inverse_kinematics(p, GEOM)
        assert forward_kinematics(j, GEOM).distance_to(p) < 1e-6
        assert 0 < j.theta2 <= math.pi
        assert -math.pi / 2 <= j.theta1 <= math.pi
        assert -math.pi < j.theta0 <= math.pi

    @given(reachable_points(), st.floats(-math.pi, math.pi))
    def test_yaw_invariance(self, p, phi):
        j = inverse_kinematics(p, GEOM)
        c, s = math.cos(phi), math.sin(phi)
        # clockwise rotation about +z, the direction theta0 is measured in
        q = CartesianPoint(p.x * c + p.y * s, -p.x * s + p.y * c, p.z)
        k = inverse_kinematics(q, GEOM)
        dyaw = (k.theta0 - j.theta0 - phi + math.pi) % (2 * math.pi) - math.pi
        if math.hypot(p.x, p.y) > 1e-6:
            assert abs(dyaw) < 1e-9
        assert k.theta1 == pytest.approx(j.theta1, abs=1e-9)
        assert k.theta2 == pytest.approx(j.theta2, abs=1e-9)

    def test_elbow_monotone_in_reach(self):
        rs = np.linspace(abs(A - B) + 1e-6, A + B - 1e-6, 2000)
        elbows = [inverse_kinematics(CartesianPoint(0, r, C), GEOM).theta2 for r in rs]
        assert all(e2 > e1 for e1, e2 in zip(elbows, elbows[1:]))


class TestForwardKinematics:
    def test_straight_forward(self):
        p = forward_kinematics(JointAngles(0, 0, math.pi), GEOM)
        assert p.as_tuple() == (0.0, A + B, C)

    def test_straight_up(self):
        p = forward_kinematics(JointAngles(0, math.pi / 2, math.pi), GEOM)
        assert p.x == 0.0
        assert p.y == pytest.approx(0.0, abs=1e-12)
        assert p.z == pytest.approx(C + A + B, abs=1e-12)

    @given(
        st.floats(-math.pi, math.pi),
        st.floats(-math.pi / 2, math.pi),
        st.floats(1e-3, math.pi),
    )
    def test_matches_transform_chain(self, t0, t1, t2):
        p = forward_kinematics(JointAngles(t0, t1, t2), GEOM)
        ref, _ = chain_fk(t0, t1, t2, A, B, C)
        assert np.allclose(p.as_tuple(), ref, atol=1e-9)

    def test_custom_geometry(self):
        g = ArmGeometry(3.0, 4.0, 0.0)
        p = forward_kinematics(JointAngles(0.0, 0.0, math.pi / 2), g)
        # elbow at (0, 3, 0), forearm pointing straight down
        assert p.as_tuple() == pytest.approx((0.0, 3.0, -4.0), abs=1e-12)


class TestWorkspace:
    def test_boundary(self):
        assert workspace_contains(CartesianPoint(0, A + B, C), GEOM)

    def test_beyond(self):
        assert not workspace_contains(CartesianPoint(0, 2 * (A + B), C), GEOM)

    def test_shoulder_excluded(self):
        assert not workspace_contains(CartesianPoint(0, 0, C), GEOM)

    def test_agrees_with_ik_on_grid(self):
        axis = np.arange(-35.0, 35.01, 2.5)
        for x in axis:
            for y in axis:
                for z in axis:
                    p = CartesianPoint(float(x), float(y), float(z))
                    try:
                        inverse_kinematics(p, GEOM)
                        ok = True
                    except (Unreachable, DegenerateAtShoulder):
                        ok = False
                    assert workspace_contains(p, GEOM) == ok, p


def test_geometry_rejects_bad_lengths():
    with pytest.raises(ValueError):
        ArmGeometry(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ArmGeometry(1.0, 1.0, -0.1)
