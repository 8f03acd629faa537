import math

import numpy as np
import pytest

from keplambert.verification import (DEFAULT_TOLERANCES, SUITES, Check, SuiteResult,
                                     random_arc, random_config, run_suite, tolerances, trial_rng)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_small_runs_pass(name):
    res = run_suite(name, trials=4, seed=3)
    assert res.trials == 4 and res.seed == 3
    assert res.passed, [c for c in res.checks if not c.passed]


def test_suites_are_reproducible():
    a = run_suite("lambert", trials=5, seed=9)
    b = run_suite("lambert", trials=5, seed=9)
    assert [(c.name, c.value) for c in a.checks] == [(c.name, c.value) for c in b.checks]


def test_trial_rng_streams():
    x = trial_rng(5, 2).random(4)
    assert np.array_equal(x, trial_rng(5, 2).random(4))
    assert not np.array_equal(x, trial_rng(5, 3).random(4))
    assert not np.array_equal(x, trial_rng(6, 2).random(4))
    ref = np.random.Generator(np.random.PCG64(np.random.SeedSequence([5, 2]))).random(4)
    assert np.array_equal(x, ref)


def test_trial_rng_accepts_full_u64_seeds():
    trial_rng(2 ** 64 - 1, 0).random()


def test_tolerance_overrides():
    tol = tolerances({"hamilton": "1e-3"})
    assert tol["hamilton"] == 1e-3
    assert tol["euler"] == DEFAULT_TOLERANCES["euler"]
    with pytest.raises(KeyError):
        tolerances({"nonsense": 1.0})


def test_overridden_tolerance_reaches_the_check():
    res = run_suite("conservation", trials=2, tol={"oracle_closure": 0.0})
    assert not res.check("oracle_closure").passed
    assert not res.passed


def test_check_semantics():
    assert Check("a", 1e-13, 1e-12, 1).passed
    assert not Check("a", 1e-12, 1e-12, 1).passed
    assert not Check("a", math.nan, 1.0, 0).passed
    assert Check("b", 2.0, 1.9, 1, higher_is_better=True).passed
    assert not Check("b", math.nan, 1.9, 0, higher_is_better=True).passed
    res = SuiteResult("x", 1, 0, [Check("a", 0.0, 1.0, 1)])
    with pytest.raises(KeyError):
        res.check("missing")


@pytest.mark.parametrize("kind", ["ellipse", "parabola", "hyperbola"])
def test_random_arcs_have_the_requested_kind(kind):
    for k in range(10):
        arc = random_arc(trial_rng(0, k), kind)
        assert arc.orbit.conic.kind == kind


def test_random_config_respects_min_angle():
    for k in range(50):
        cfg = random_config(trial_rng(1, k), min_angle=0.05)
        cos = (cfg.A[0] * cfg.B[0] + cfg.A[1] * cfg.B[1]) / (cfg.r_A * cfg.r_B)
        assert abs(cos) < math.cos(0.05) + 1e-15
