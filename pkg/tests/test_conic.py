import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from keplambert.conic import (ConicOrbit, RectilinearOrbit, StateVector, UnifocalConic, Vec2,
                              anomaly_of_state, angular_momentum, eccentricity_vector, energy,
                              on_branch, orbit_from_state, second_focus, semimajor_axis,
                              unifocal_residual)
from keplambert.errors import ParabolicError
from keplambert.kepler import position_at, state_at

SQ2 = math.sqrt(2.0)


def S(x, y, vx, vy):
    return StateVector(Vec2(x, y), Vec2(vx, vy))


@pytest.mark.parametrize("state, C", [
    (S(1, 0, 0, 1), 1.0),
    (S(1, 0, 1, 0), 0.0),
    (S(1, 0, 0, 0.5), 0.5),
])
def test_angular_momentum(state, C):
    assert angular_momentum(state) == C


@pytest.mark.parametrize("state, E", [
    (S(1, 0, 0, 1), (0.0, 0.0)),
    (S(1, 0, 0, SQ2), (-1.0, 0.0)),
    (S(1, 0, 0, 0.5), (0.75, 0.0)),
])
def test_eccentricity_vector(state, E):
    got = eccentricity_vector(state)
    assert got.x == pytest.approx(E[0], abs=1e-15)
    assert got.y == pytest.approx(E[1], abs=1e-15)


@pytest.mark.parametrize("state, H", [
    (S(1, 0, 0, 1), -0.5),
    (S(1, 0, 0, SQ2), 0.0),
    (S(2, 0, 0, 1), 0.0),
    (S(2, 0, 0, 1 / SQ2), -0.25),
])
def test_energy(state, H):
    assert energy(state) == pytest.approx(H, abs=1e-15)


def test_parabolic_state_has_unit_eccentricity_and_zero_energy():
    st_ = S(1, 0, 0, SQ2)
    assert eccentricity_vector(st_).norm() == pytest.approx(1.0, abs=1e-15)
    assert abs(energy(st_)) < 1e-15


def test_energy_identity_on_example():
    # alpha**2 + beta**2 - 1 = 2 H gamma with H = -0.875, gamma = 0.25
    st_ = S(1, 0, 0, 0.5)
    E = eccentricity_vector(st_)
    assert E.x ** 2 + E.y ** 2 - 1.0 == pytest.approx(2 * -0.875 * 0.25, abs=1e-15)


def test_orbit_from_state_circle():
    o = orbit_from_state(S(1, 0, 0, 1))
    assert isinstance(o, ConicOrbit)
    assert (o.conic.alpha, o.conic.beta, o.conic.gamma, o.orientation) == (0, 0, 1, 1)


def test_orbit_from_state_radial():
    o = orbit_from_state(S(1, 0, 1, 0))
    assert isinstance(o, RectilinearOrbit)
    assert o.ray == (1.0, 0.0)
    assert o.H == -0.5


def test_orbit_from_state_ellipse_example():
    o = orbit_from_state(S(1, 0, 0, 0.5))
    c = o.conic
    assert (c.alpha, c.beta, c.gamma, o.orientation) == pytest.approx((0.75, 0, 0.25, 1))
    assert unifocal_residual(c, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("conic, p, res", [
    (UnifocalConic(0, 0, 1), (0, 1), 0.0),
    (UnifocalConic(0, 0, 1), (2, 0), 1.0),
    (UnifocalConic(0.75, 0, 0.25), (1, 0), 0.0),
])
def test_unifocal_residual(conic, p, res):
    assert unifocal_residual(conic, p) == pytest.approx(res, abs=1e-15)


def test_far_hyperbola_branch_is_not_on_the_orbit():
    c = UnifocalConic(2.0, 0.0, 1.0)
    # r = 2x + 1 has a second sheet where 2x + 1 < 0 and r = -(2x + 1)
    far = Vec2(-1.0, 0.0)
    assert unifocal_residual(c, far) == pytest.approx(2.0)
    near = position_at(ConicOrbit(c, 1), 0.4)
    assert on_branch(c, near)


@pytest.mark.parametrize("H, a", [(-0.5, 1.0), (-0.25, 2.0), (0.5, -1.0)])
def test_semimajor_axis(H, a):
    assert semimajor_axis(H) == a


def test_semimajor_axis_parabola_raises():
    with pytest.raises(ParabolicError):
        semimajor_axis(0.0)


def test_second_focus_examples():
    assert second_focus(UnifocalConic(0, 0, 1), -0.5) == (0.0, 0.0)
    F = second_focus(UnifocalConic(0.75, 0, 0.25), -0.875)
    assert F.x == pytest.approx(6.0 / 7.0, rel=1e-15) and F.y == 0.0
    hyp = UnifocalConic(1.5, 0.0, 1.25)   # e**2 - 1 = 2 H gamma with H = 0.5, a = -1
    F = second_focus(hyp, 0.5)
    assert F == (-3.0, 0.0)
    with pytest.raises(ParabolicError):
        second_focus(UnifocalConic(1.0, 0.0, 1.0))


def _branch_points(conic, n=50):
    orbit = ConicOrbit(conic, 1)
    span = math.pi if conic.e2m1 < 0 else 2.0
    return [position_at(orbit, s) for s in np.linspace(-span, span, n)]


def test_second_focus_distance_sums():
    ell = UnifocalConic(0.75, 0, 0.25)
    F = second_focus(ell)
    a = semimajor_axis(ell.energy)
    for P in _branch_points(ell):
        assert (P - F).norm() + P.norm() == pytest.approx(2 * a, rel=1e-13)
    hyp = UnifocalConic(1.5, 0.0, 1.25)
    F = second_focus(hyp)
    for P in _branch_points(hyp):
        assert abs((P - F).norm() - P.norm()) == pytest.approx(2.0, rel=1e-12)


def test_invalid_values_rejected():
    with pytest.raises(ValueError):
        UnifocalConic(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        UnifocalConic(math.nan, 0.0, 1.0)
    with pytest.raises(ValueError):
        Vec2(math.inf, 0.0)
    with pytest.raises(ValueError):
        S(0, 0, 1, 0)
    with pytest.raises(ValueError):
        RectilinearOrbit(Vec2(2.0, 0.0), -0.5)


# ---------------------------------------------------------------------------
# properties

coord = st.floats(-5.0, 5.0)
speed = st.floats(-3.0, 3.0)


@st.composite
def states(draw):
    x, y = draw(coord), draw(coord)
    assume(math.hypot(x, y) > 0.05)
    return S(x, y, draw(speed), draw(speed))


@given(states())
def test_energy_identity(st_):
    C = angular_momentum(st_)
    assume(abs(C) > 1e-6)
    E = eccentricity_vector(st_)
    lhs = E.x ** 2 + E.y ** 2 - 1.0
    rhs = 2.0 * energy(st_) * C * C
    # the inputs are rounded; the identity holds to the conditioning of the sums
    scale = 1.0 + st_.v.dot(st_.v) * st_.r + E.dot(E)
    assert abs(lhs - rhs) <= 1e-14 * max(1.0, scale ** 2)


@given(states())
def test_state_round_trip(st_):
    assume(abs(angular_momentum(st_)) > 1e-3)
    orbit = orbit_from_state(st_)
    back = state_at(orbit, anomaly_of_state(orbit, st_))
    scale_q = st_.r
    scale_v = max(st_.v.norm(), 1.0 / math.sqrt(st_.r))
    assert (back.q - st_.q).norm() <= 1e-12 * scale_q
    assert (back.v - st_.v).norm() <= 1e-12 * scale_v
    assert back.t == pytest.approx(st_.t, abs=1e-10 * max(1.0, abs(orbit.t_peri)))


@given(st.floats(0.01, 0.99), st.floats(0.0, 2 * math.pi), st.floats(0.1, 3.0))
def test_pericenter_points_opposite_eccentricity(e, th, g):
    conic = UnifocalConic(e * math.cos(th), e * math.sin(th), g)
    s = np.linspace(-math.pi, math.pi, 2001)
    pts = [position_at(ConicOrbit(conic, 1), x) for x in s]
    nearest = min(pts, key=lambda p: p.norm())
    d = nearest.unit()
    assert (d + conic.E / e).norm() < 1e-10
    assert nearest.norm() == pytest.approx(g / (1 + e), rel=1e-14)
