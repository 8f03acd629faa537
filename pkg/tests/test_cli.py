import csv
import io
import json
import math
import re
import subprocess
import sys

import pytest

from keplambert.cli import main, parse_seed, render_records
from keplambert.geometry import euler_parabolic_tof, ChordConfig

EULER_QUARTER = euler_parabolic_tof(ChordConfig((1, 0), (0, 1)))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(line) for line in text.splitlines()]


class TestTof:
    def test_half_turn_from_state(self, capsys):
        code, out, _ = run(capsys, "tof", "--state", "1,0,0,1", "--turns", "0.5")
        assert code == 0
        rec = records(out)[0]
        assert rec["dt"] == pytest.approx(math.pi, rel=1e-15)
        assert rec["H"] == pytest.approx(-0.5) and rec["kind"] == "ellipse"

    def test_collision_to_culmination(self, capsys):
        code, out, _ = run(capsys, "tof", "--rectilinear", "--H", "-0.5",
                           "--from-collision", "--to-culmination")
        assert code == 0
        assert records(out)[0]["dt"] == pytest.approx(math.pi, rel=1e-15)

    def test_conic_interval(self, capsys):
        from keplambert.conic import UnifocalConic
        from keplambert.kepler import conic_arc, time_of_flight
        code, out, _ = run(capsys, "tof", "--conic", "0.75,0,0.25", "--from", "-1", "--to", "2")
        assert code == 0
        ref = time_of_flight(conic_arc(UnifocalConic(0.75, 0, 0.25), 1, -1.0, 2.0))
        assert records(out)[0]["dt"] == ref

    @pytest.mark.parametrize("argv", [
        ["tof"],
        ["tof", "--state", "1,0,0"],
        ["tof", "--state", "1,0,0,1"],
        ["tof", "--conic", "0.5,0,1"],
        ["tof", "--conic", "0,0,-1", "--from", "0", "--to", "1"],
        ["tof", "--state", "1,0,nan,1", "--turns", "1"],
        ["--seed", "-1", "tof"],
        ["--tol", "bogus=1", "tof"],
        ["frobnicate"],
    ])
    def test_bad_input(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 2
        assert out == ""

    def test_culmination_needs_negative_energy(self, capsys):
        code, _, err = run(capsys, "tof", "--rectilinear", "--H", "0.5", "--to-culmination")
        assert code == 3 and "infeasible" in err


class TestLambert:
    def test_parabolic_closure(self, capsys):
        code, out, _ = run(capsys, "lambert", "--A", "1,0", "--B", "0,1",
                           "--dt", repr(EULER_QUARTER), "--direction", "ccw")
        assert code == 0
        rec = records(out)[0]
        assert abs(rec["H"]) < 1e-9
        assert rec["residual"] < 1e-12

    def test_both_directions_are_distinct(self, capsys):
        code, out, _ = run(capsys, "lambert", "--A", "1,0", "--B", "0,1", "--dt", "2")
        assert code == 0
        ccw, cw = records(out)
        assert (ccw["direction"], cw["direction"]) == ("ccw", "cw")
        assert ccw["alpha"] != cw["alpha"] or ccw["beta"] != cw["beta"]
        assert ccw["class"] != cw["class"]

    def test_velocity_decomposition_reported(self, capsys):
        code, out, _ = run(capsys, "lambert", "--A", "1,0", "--B", "0,1",
                           "--dt", repr(math.pi / 2), "--direction", "ccw")
        rec = records(out)[0]
        assert rec["rho"] == pytest.approx(1.0, rel=1e-10)
        assert (rec["k_x"], rec["k_y"]) == pytest.approx((-1.0, 1.0), rel=1e-10)

    def test_infeasible_multi_revolution(self, capsys):
        code, out, err = run(capsys, "lambert", "--A", "1,0", "--B", "0,1", "--dt", "2",
                             "--revs", "1")
        assert code == 3
        assert "no arc with requested winding" in err
        assert out == ""

    def test_same_ray(self, capsys):
        code, _, err = run(capsys, "lambert", "--A", "1,0", "--B", "2,0", "--dt", "1")
        assert code == 3 and "rectilinear" in err

    @pytest.mark.parametrize("dt", ["0", "-1", "inf", "x"])
    def test_bad_time(self, capsys, dt):
        code, _, _ = run(capsys, "lambert", "--A", "1,0", "--B", "0,1", "--dt", dt)
        assert code == 2


class TestCycle:
    def test_report_and_limits(self, capsys):
        code, out, _ = run(capsys, "cycle", "--conic", "0.2,-0.3,1.1", "--from", "-0.7",
                           "--to", "1.4", "--samples", "12")
        assert code == 0
        recs = records(out)
        summary = recs[0]
        assert summary["record"] == "summary" and summary["passed"] is True
        dts = [r["dt"] for r in recs if r["record"] == "arc"]
        assert max(dts) - min(dts) < 1e-9 * dts[0]
        limits = [r for r in recs if r["record"] == "limit"]
        assert [r["phi"] for r in limits] == [0.0, math.pi]
        for r in limits:
            assert r["dt"] == pytest.approx(dts[0], rel=1e-9)

    def test_random_seed_and_svg(self, capsys, tmp_path):
        svg = tmp_path / "cycle.svg"
        code, out, _ = run(capsys, "--seed", "7", "cycle", "--random", "--emit-svg", str(svg))
        assert code == 0
        assert svg.read_text().startswith("<?xml") or svg.read_text().startswith("<svg")

    def test_too_few_samples(self, capsys):
        code, _, _ = run(capsys, "cycle", "--random", "--samples", "4")
        assert code == 2

    def test_failing_tolerance_exits_4(self, capsys):
        code, out, _ = run(capsys, "--tol", "dt_invariance=1e-30", "cycle", "--random")
        assert code == 4
        assert records(out)[0]["passed"] is False


class TestVerify:
    def test_small_cycle_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "cycle", "--trials", "5", "--seed", "7")
        assert code == 0
        recs = records(out)
        assert recs[-1] == {"record": "suite", "suite": "cycle", "trials": 5, "seed": 7,
                            "passed": True}

    def test_action_suite_emits_convergence_table(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "action", "--trials", "4")
        assert code == 0
        table = [r for r in records(out) if r["record"] == "table"]
        assert [r["h"] for r in table] == [1e-3, 1e-4, 1e-5]
        res = [r["max_residual"] for r in table]
        assert res[0] > res[1] > res[2]

    def test_impossible_tolerance_exits_4(self, capsys):
        code, _, _ = run(capsys, "--tol", "lambert_residual=1e-300", "verify", "--suite",
                         "lambert", "--trials", "3")
        assert code == 4

    def test_zero_trials(self, capsys):
        assert run(capsys, "verify", "--trials", "0")[0] == 2


class TestOutputContract:
    def test_seventeen_significant_digits(self, capsys):
        _, out, _ = run(capsys, "tof", "--state", "1,0,0,1", "--turns", "0.5")
        m = re.search(r'"dt": ([0-9.e+-]+)', out)
        assert m.group(1) == "3.1415926535897931"
        assert float(m.group(1)) == math.pi

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "lambert", "--A", "1,0", "--B", "0,1",
                           "--dt", "2")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["direction"] for r in rows] == ["ccw", "cw"]
        assert float(rows[0]["dt"]) == pytest.approx(2.0, rel=1e-12)

    def test_flags_after_subcommand(self, capsys):
        a = run(capsys, "--format", "csv", "tof", "--state", "1,0,0,1", "--turns", "1")
        b = run(capsys, "tof", "--state", "1,0,0,1", "--turns", "1", "--format", "csv")
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "o.json"
        code, out, _ = run(capsys, "--out", str(path), "tof", "--state", "1,0,0,1", "--turns", "1")
        assert code == 0 and out == ""
        assert records(path.read_text())[0]["dt"] == pytest.approx(2 * math.pi)

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, _ = run(capsys, "--out", str(tmp_path / "no" / "dir.json"), "tof",
                         "--state", "1,0,0,1", "--turns", "1")
        assert code == 2

    def test_deterministic(self, capsys):
        argv = ["--seed", "123", "verify", "--suite", "geometry", "--trials", "20"]
        assert run(capsys, *argv) == run(capsys, *argv)

    def test_seed_range(self):
        assert parse_seed(str(2 ** 64 - 1)) == 2 ** 64 - 1
        assert parse_seed("0x10") == 16
        with pytest.raises(Exception):
            parse_seed(str(2 ** 64))

    def test_non_finite_values_render_as_null(self):
        assert render_records([{"x": math.nan}], "json") == '{"x": null}\n'

    def test_module_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "keplambert", "tof", "--state", "1,0,0,1",
                              "--turns", "1"], capture_output=True, text=True)
        assert out.returncode == 0
        assert json.loads(out.stdout)["dt"] == pytest.approx(2 * math.pi)


class TestPlot:
    def test_chord_family(self, capsys):
        code, out, _ = run(capsys, "plot", "--fig", "chord-family", "--A", "1,0", "--B", "0,1")
        assert code == 0 and "<svg" in out

    @pytest.mark.parametrize("fig", ["equal-invariant", "moving-foci", "cycle"])
    def test_cycle_figures_deterministic(self, capsys, fig):
        argv = ["plot", "--fig", fig, "--conic", "0.2,-0.3,1.1", "--from", "-0.7", "--to", "1.4"]
        a = run(capsys, *argv)
        assert a[0] == 0
        assert a == run(capsys, *argv)

    def test_chord_family_needs_ends(self, capsys):
        assert run(capsys, "plot", "--fig", "chord-family")[0] == 2

    def test_unknown_figure(self, capsys):
        assert run(capsys, "plot", "--fig", "png")[0] == 2
