"""Acceptance criteria at full size and default tolerances.

Each criterion is a separate test and prints one PASS/FAIL line; the lines
are repeated in the terminal summary so they show without ``-s``.
"""
import functools

import pytest

from keplambert.verification import run_suite

CRITERIA = {
    1: ("cycle invariance", "cycle", ["dt", "chord", "radii_sum", "H"]),
    2: ("oracle closure", "conservation", ["oracle_closure"]),
    3: ("parabolic time and first-order approach", "lambert", ["euler", "euler_order"]),
    4: ("one arc per direction, solver residual", "lambert",
        ["solutions_per_direction", "lambert_residual"]),
    5: ("rescaled construction", "lambert",
        ["gauss_residual", "energy_identity", "gauss_count", "count_sequence",
         "h_min_location"]),
    6: ("action derivative and cycle action", "action",
        ["hamilton", "hamilton_order", "hamilton_fine_scaling", "action_cycle"]),
    7: ("geometry suite", "geometry",
        ["geometric_progression", "bisector_line", "bisector_angle", "focus_one_sided",
         "focus_expected", "triad_exactly_two"]),
    8: ("rectilinear extension", "rectilinear",
        ["period", "culmination_time", "cycloid_path", "collision_continuity",
         "velocity_flip", "crossing_time"]),
    9: ("cycle closure and shared class", "cycle", ["closure", "class_mismatch"]),
}


REPORT = []


@functools.lru_cache(maxsize=None)
def suite(name):
    return run_suite(name, None, seed=0)


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    title, name, keys = CRITERIA[number]
    res = suite(name)
    checks = [res.check(k) for k in keys]
    ok = all(c.passed for c in checks)
    worst = ", ".join(f"{c.name}={c.value:.3g}" for c in checks)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{worst}]"
    REPORT.append(line)
    print("\n" + line)
    assert ok, [c for c in checks if not c.passed]
