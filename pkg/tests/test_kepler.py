import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from keplambert.conic import ConicOrbit, RectilinearOrbit, UnifocalConic, Vec2
from keplambert.errors import CollisionError, NonperiodicError
from keplambert.kepler import (conic_arc, period, position_at, rectilinear_arc,
                               rectilinear_position, solve_kepler_elliptic,
                               solve_kepler_hyperbolic, state_at, time_of_flight)
from keplambert.propagator import propagate

PI = math.pi
# 40-digit root finding (mpmath.findroot) on the defining equations
U_E1_HALF_PI = 2.3098814600100572609     # u - sin u = pi/2
W_E15_M10 = 2.8439472024166402799        # 1.5 sinh w - w = 10


@pytest.mark.usefixtures("backend")
class TestKeplerSolvers:
    def test_elliptic_examples(self):
        assert solve_kepler_elliptic(0.0, 0.5) == 0.0
        for e in (0.0, 0.3, 0.9, 1.0):
            assert solve_kepler_elliptic(PI, e) == pytest.approx(PI, abs=1e-15)
        u = solve_kepler_elliptic(PI / 2, 1.0)
        assert u == pytest.approx(U_E1_HALF_PI, rel=1e-15)
        assert abs(u - math.sin(u) - PI / 2) < 1e-14

    def test_elliptic_parabolic_limit_small_mean_anomaly(self):
        # u - sin u ~ u**3/6 near zero
        for M in (1e-12, 1e-8, 1e-4):
            u = solve_kepler_elliptic(M, 1.0)
            assert u == pytest.approx((6 * M) ** (1 / 3), rel=1e-3)

    def test_hyperbolic_examples(self):
        assert solve_kepler_hyperbolic(0.0, 1.7) == 0.0
        assert solve_kepler_hyperbolic(2 * math.sinh(1.0) - 1.0, 2.0) == pytest.approx(1.0, rel=1e-15)
        assert solve_kepler_hyperbolic(10.0, 1.5) == pytest.approx(W_E15_M10, rel=1e-15)

    def test_hyperbolic_rejects_elliptic_eccentricity(self):
        with pytest.raises(ValueError):
            solve_kepler_hyperbolic(1.0, 0.5)


@given(st.floats(-100.0, 100.0), st.floats(0.0, 1.0))
def test_elliptic_residual(M, e):
    Mr = math.remainder(M, 2 * PI)
    ur = solve_kepler_elliptic(Mr, e)
    assert abs(ur - e * math.sin(ur) - Mr) < 1e-14
    # whole periods pass straight through
    u = solve_kepler_elliptic(M, e)
    assert abs((u - ur) - (M - Mr)) <= 4 * 2.2e-16 * max(1.0, abs(M))


@given(st.floats(-1e4, 1e4), st.floats(1.0 + 1e-6, 20.0))
def test_hyperbolic_residual(M, e):
    w = solve_kepler_hyperbolic(M, e)
    assert abs(e * math.sinh(w) - w - M) < 1e-13 * max(1.0, abs(M))


def test_kepler_solvers_on_many_random_draws(rng):
    M = rng.uniform(-PI, PI, 20000)
    e = rng.uniform(0.0, 1.0, 20000)
    worst = max(abs(u - ee * math.sin(u) - m)
                for m, ee, u in ((m, ee, solve_kepler_elliptic(m, ee)) for m, ee in zip(M, e)))
    assert worst < 1e-14


@pytest.mark.parametrize("H, T", [(-0.5, 2 * PI), (-0.125, 16 * PI), (-2.0, 2 * PI / 8)])
def test_period(H, T):
    assert period(H) == pytest.approx(T, rel=1e-15)


@pytest.mark.parametrize("H", [0.0, 0.3])
def test_period_nonperiodic(H):
    with pytest.raises(NonperiodicError):
        period(H)


@pytest.mark.usefixtures("backend")
class TestTimeOfFlight:
    def test_half_circle(self):
        arc = conic_arc(UnifocalConic(0, 0, 1), 1, 0.0, PI)
        assert time_of_flight(arc) == pytest.approx(PI, rel=1e-15)
        assert time_of_flight(arc, method="closed") == pytest.approx(PI, rel=1e-15)

    def test_rectilinear_collision_to_culmination(self):
        arc = rectilinear_arc(Vec2(1, 0), -0.5, 0.0, PI)
        assert time_of_flight(arc) == pytest.approx(PI, rel=1e-15)
        assert position_at(arc.orbit, arc.s_A).norm() == 0.0
        assert position_at(arc.orbit, arc.s_B).norm() == pytest.approx(2.0, rel=1e-15)

    def test_extra_revolution_adds_one_period(self):
        c = UnifocalConic(0.3, -0.4, 0.8)
        a = conic_arc(c, 1, -0.4, 1.1)
        b = conic_arc(c, 1, -0.4, 1.1 + 2 * PI)
        assert time_of_flight(b) - time_of_flight(a) == pytest.approx(period(c.energy), rel=1e-13)

    def test_unknown_method(self):
        arc = conic_arc(UnifocalConic(0, 0, 1), 1, 0.0, 1.0)
        with pytest.raises(ValueError):
            time_of_flight(arc, method="series")


@pytest.mark.usefixtures("backend")
class TestRectilinear:
    def test_culmination_and_next_collision(self):
        o = RectilinearOrbit(Vec2(1, 0), -0.5)
        r, out = rectilinear_position(o, PI)
        assert r == pytest.approx(2.0, rel=1e-15)
        r, out = rectilinear_position(o, 2 * PI)
        assert r < 1e-15

    def test_zero_energy_law(self):
        # 6 t = (2 x)**1.5 at x = 2 gives t = 4/3
        o = RectilinearOrbit(Vec2(0, 1), 0.0)
        r, out = rectilinear_position(o, 4.0 / 3.0)
        assert r == pytest.approx(2.0, rel=1e-15) and out == 1

    def test_positive_energy_round_trip(self):
        o = RectilinearOrbit(Vec2(1, 0), 0.7)
        for u in (-2.0, -0.1, 0.5, 3.0):
            st_ = state_at(o, u)
            r, out = rectilinear_position(o, st_.t)
            assert r == pytest.approx(st_.r, rel=1e-12)
            assert out == (1 if u > 0 else -1)

    def test_velocity_flips_through_collision(self):
        o = RectilinearOrbit(Vec2(1, 0), -0.5)
        before = state_at(o, -1e-3)
        after = state_at(o, 1e-3)
        assert before.v.x < 0 < after.v.x
        assert before.r == pytest.approx(after.r, rel=1e-15)
        with pytest.raises(CollisionError):
            state_at(o, 0.0)


@pytest.mark.usefixtures("backend")
def test_state_at_examples():
    st_ = state_at(ConicOrbit(UnifocalConic(0, 0, 1), 1), PI / 2)
    assert st_.q.x == pytest.approx(0.0, abs=1e-15) and st_.q.y == pytest.approx(1.0)
    assert st_.v.x == pytest.approx(-1.0) and st_.v.y == pytest.approx(0.0, abs=1e-15)
    c = UnifocalConic(0.75, 0, 0.25)
    peri = state_at(ConicOrbit(c, 1), 0.0)
    assert peri.q.x == pytest.approx(-0.25 / 1.75, rel=1e-15) and peri.q.y == 0.0
    top = state_at(RectilinearOrbit(Vec2(0, 1), -0.5), PI)
    assert top.q == pytest.approx((0.0, 2.0)) and top.v.norm() < 1e-15


# ---------------------------------------------------------------------------
# properties

@st.composite
def arcs(draw, e_lo=0.0, e_hi=2.5):
    e = draw(st.floats(e_lo, e_hi))
    th = draw(st.floats(0.0, 2 * PI))
    g = draw(st.floats(0.2, 3.0))
    orient = draw(st.sampled_from([1, -1]))
    c = UnifocalConic(e * math.cos(th), e * math.sin(th), g)
    lim = 3.0 if c.e2m1 < 0 else 2.0
    s0 = draw(st.floats(-lim, lim))
    ds = draw(st.floats(1e-3, 4.0))
    return conic_arc(c, orient, s0, s0 + ds)


@given(arcs())
def test_universal_and_closed_forms_agree(arc):
    a = time_of_flight(arc)
    b = time_of_flight(arc, method="closed")
    assert a > 0
    # the closed form differences two epochs measured from the pericenter
    assert abs(a - b) <= 1e-12 * a * max(1.0, abs(arc.orbit.t_peri) / a)


@given(arcs(e_lo=0.999, e_hi=1.001))
def test_near_parabolic_band(arc):
    a = time_of_flight(arc)
    b = time_of_flight(arc, method="closed")
    assert abs(a - b) <= 1e-12 * a * max(1.0, abs(arc.orbit.t_peri) / a)


@given(arcs())
def test_time_increases_with_final_anomaly(arc):
    c, o = arc.orbit.conic, arc.orbit.orientation
    ts = [time_of_flight(conic_arc(c, o, arc.s_A, arc.s_A + d))
          for d in np.linspace(1e-3, arc.s_B - arc.s_A + 1e-3, 12)]
    assert all(t1 > t0 for t0, t1 in zip(ts, ts[1:]))


@given(st.floats(-0.9, 0.9).filter(lambda h: abs(h) > 1e-3), st.floats(-3, 3), st.floats(0.05, 3))
def test_rectilinear_tof_matches_closed_form(H, u0, du):
    assume(H < 0 or abs(u0) + du < 6)
    arc = rectilinear_arc(Vec2(1, 0), H, u0, u0 + du)
    a = time_of_flight(arc)
    b = time_of_flight(arc, method="closed")
    assert abs(a - b) <= 1e-12 * max(a, abs(arc.orbit.t_ref) + abs(b))


@pytest.mark.parametrize("seed", range(6))
def test_oracle_lands_on_final_state(seed):
    rng = np.random.Generator(np.random.PCG64([seed, 99]))
    e = rng.uniform(0.0, 1.8)
    th = rng.uniform(0, 2 * PI)
    c = UnifocalConic(e * math.cos(th), e * math.sin(th), rng.uniform(0.3, 2.0))
    s0 = rng.uniform(-1.5, 1.5)
    arc = conic_arc(c, 1 if seed % 2 else -1, s0, s0 + rng.uniform(0.1, 2.5))
    A = state_at(arc.orbit, arc.s_A)
    B = state_at(arc.orbit, arc.s_B)
    out = propagate(A, time_of_flight(arc), tol=1e-12).final
    assert (out.q - B.q).norm() <= 1e-8 * B.q.norm()
