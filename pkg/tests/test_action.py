import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keplambert.action import (action_report, bisector_tangent_check,
                               jacobi_velocity_decomposition, maupertuis_action,
                               maupertuis_closed_form, principal_action, verify_hamilton_dwdH)
from keplambert.conic import UnifocalConic, Vec2
from keplambert.cycle import cycle_arc_at, cycle_from_arc
from keplambert.errors import DegenerateError, InfeasibleError
from keplambert.geometry import ChordConfig, gauss_arcs, h_min
from keplambert.kepler import conic_arc, rectilinear_arc, state_at, time_of_flight
from keplambert.propagator import propagate
from keplambert.verification import random_arc, random_hamilton_arc, trial_rng

PI = math.pi
CIRCLE = UnifocalConic(0, 0, 1)


@pytest.mark.usefixtures("backend")
class TestCircle:
    def test_maupertuis(self):
        assert maupertuis_action(conic_arc(CIRCLE, 1, 0.0, 2 * PI)) == pytest.approx(2 * PI, rel=1e-14)
        assert maupertuis_action(conic_arc(CIRCLE, 1, 0.0, PI)) == pytest.approx(PI, rel=1e-14)

    def test_principal(self):
        assert principal_action(conic_arc(CIRCLE, 1, 0.0, 2 * PI)) == pytest.approx(3 * PI, rel=1e-14)
        assert principal_action(conic_arc(CIRCLE, 1, 0.0, PI)) == pytest.approx(1.5 * PI, rel=1e-14)


def _arcs(n, seed):
    return [random_arc(trial_rng(seed, k)) for k in range(n)]


@pytest.mark.parametrize("arc", _arcs(12, 21))
def test_action_identity_and_closed_form(arc):
    rep = action_report(arc)
    assert rep.identity_residual < 1e-12
    assert rep.w == pytest.approx(maupertuis_closed_form(arc), rel=1e-12)
    assert rep.w > 0


@pytest.mark.parametrize("arc", _arcs(6, 22))
def test_action_matches_oracle_time_quadrature(arc):
    res = propagate(state_at(arc.orbit, arc.s_A), time_of_flight(arc), tol=1e-12)
    w = maupertuis_action(arc)
    assert abs(res.action - w) <= 1e-9 * w


def test_rectilinear_action_through_culmination():
    # H = -1/2 radial arc from collision to culmination: w = int v**2 dt with
    # r = 1 - cos u, t = u - sin u, v**2 = 2/r - 1 -> w = int (1 + cos u) du = pi
    arc = rectilinear_arc(Vec2(1, 0), -0.5, 1e-12, PI)
    assert maupertuis_action(arc) == pytest.approx(PI, rel=1e-11)


@pytest.mark.parametrize("seed", range(8))
def test_hamilton_relation(seed):
    arc = random_hamilton_arc(trial_rng(seed, 23))
    checks = [verify_hamilton_dwdH(arc, h) for h in (1e-3, 1e-4, 1e-5)]
    assert checks[-1].residual < 1e-6
    if checks[1].residual >= 10 * checks[1].noise_floor:
        assert checks[1].observed_order(checks[0]) > 1.9
    else:
        # already at the rounding floor of w one step earlier
        assert checks[0].residual < 100 * checks[1].noise_floor
    # finest step: the h**2 prediction holds up to the rounding floor
    pred = checks[1].residual * (checks[2].h / checks[1].h) ** 2
    assert abs(checks[2].residual - pred) <= 0.25 * pred + checks[2].noise_floor


def test_hamilton_on_quarter_circle():
    # H = -0.5 sits above the chord's minimal energy -0.586
    arc = conic_arc(CIRCLE, 1, 0.0, PI / 2)
    assert verify_hamilton_dwdH(arc, 1e-4).residual < 1e-7


def test_hamilton_needs_energy_above_the_minimum():
    cfg = ChordConfig((1.0, 0.0), (0.0, 1.0))
    arc = gauss_arcs(cfg, h_min(cfg) * (1 - 1e-12), 1)[0]
    # the stencil shrinks until it fits or gives up
    try:
        chk = verify_hamilton_dwdH(arc, 1e-3)
    except InfeasibleError:
        return
    assert chk.h < 1e-11


def test_hamilton_rejects_radial_arcs():
    with pytest.raises(ValueError):
        verify_hamilton_dwdH(rectilinear_arc(Vec2(1, 0), -0.5, 0.5, 1.5))


def test_action_constant_along_a_cycle():
    seed = conic_arc(UnifocalConic(0.3, -0.2, 0.9), 1, -0.8, 1.7)
    cyc = cycle_from_arc(seed)
    w0 = maupertuis_action(seed)
    for phi in np.linspace(0.05, PI - 0.05, 9):
        assert maupertuis_action(cycle_arc_at(cyc, phi)) == pytest.approx(w0, rel=1e-10)
        assert maupertuis_action(cycle_arc_at(cyc, -phi)) == pytest.approx(w0, rel=1e-10)


class TestJacobi:
    def test_quarter_turn(self):
        j = jacobi_velocity_decomposition(conic_arc(CIRCLE, 1, 0.0, PI / 2))
        assert j.rho == pytest.approx(1.0, rel=1e-15)
        assert j.k.x == pytest.approx(-1.0, rel=1e-15) and j.k.y == pytest.approx(1.0, rel=1e-15)
        assert j.chord_residual < 1e-15

    def test_half_turn_is_degenerate(self):
        with pytest.raises(DegenerateError):
            jacobi_velocity_decomposition(conic_arc(CIRCLE, 1, 0.0, PI))

    @settings(max_examples=40)
    @given(st.integers(0, 2 ** 32))
    def test_random_arcs(self, seed):
        arc = random_arc(trial_rng(seed, 1))
        try:
            j = jacobi_velocity_decomposition(arc)
        except DegenerateError:
            return
        assert j.parallel_residual < 1e-10
        assert j.closure_residual < 1e-10
        assert j.chord_residual < 1e-10


class TestBisector:
    def test_quarter_turn(self):
        v = bisector_tangent_check(conic_arc(CIRCLE, 1, 0.0, PI / 2))
        assert v.Q.x == pytest.approx(1.0, rel=1e-15) and v.Q.y == pytest.approx(1.0, rel=1e-15)
        assert v.holds()

    def test_symmetric_arc_meets_on_the_axis(self):
        v = bisector_tangent_check(conic_arc(UnifocalConic(0.0, 0.5, 1.0), 1, -1.0, 1.0))
        assert abs(v.Q.x) < 1e-15
        assert v.holds()

    def test_parallel_tangents(self):
        with pytest.raises(DegenerateError):
            bisector_tangent_check(conic_arc(CIRCLE, 1, 0.0, PI))

    @settings(max_examples=40)
    @given(st.integers(0, 2 ** 32))
    def test_random_arcs(self, seed):
        arc = random_arc(trial_rng(seed, 2))
        try:
            v = bisector_tangent_check(arc)
        except DegenerateError:
            return
        assert v.holds()
