"""Command-line interface: ``keplambert {tof,lambert,cycle,verify,plot}``.

Records are written one per line as JSON objects with a fixed key order,
or as CSV with the same columns.  Floats carry 17 significant digits so
output round-trips exactly and repeated runs are byte-identical.

Exit codes: 0 ok, 2 bad input, 3 infeasible request, 4 verification failure.
"""
import argparse
import csv
import io
import json
import math
import sys

from .action import jacobi_velocity_decomposition
from .conic import (RectilinearOrbit, StateVector, UnifocalConic, Vec2, anomaly_of_state,
                    orbit_from_state)
from .cycle import (arc_class_of, cycle_from_arc, cycle_invariant_report, rectilinear_limit)
from .errors import DegenerateError, InfeasibleError, KeplerError, VerificationError
from .geometry import Direction, solve_lambert
from .kepler import (TWO_PI, conic_arc, rectilinear_arc, state_at, time_of_flight)
from .svg import (figure_chord_family, figure_cycle, figure_equal_invariant,
                  figure_moving_foci)
from .verification import (DEFAULT_TOLERANCES, SUITES, random_cycle_seed, run_suite,
                           tolerances, trial_rng)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFICATION = 4
U64_MAX = 2 ** 64 - 1


class BadInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization

def _fmt_float(x):
    return format(x, ".17g")


def _json_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v) if math.isfinite(v) else "null"
    if v is None:
        return "null"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return json.dumps(str(v))


def _csv_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(x) for x in v)
    return str(v)


def render_records(records, fmt):
    if fmt == "json":
        return "".join("{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}"
                                        for k, v in rec.items()) + "}\n"
                       for rec in records)
    columns = []
    for rec in records:
        for k in rec:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_csv_value(rec.get(k)) for k in columns])
    return buf.getvalue()


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing helpers

def parse_vec(text, n=2):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers: {text!r}")
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected {n} finite comma-separated numbers: {text!r}")
    return vals


def parse_seed(text):
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {text!r}")
    if not 0 <= seed <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


def parse_tol(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=REAL: {text!r}")
    if name not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"unknown tolerance {name!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}")
    try:
        val = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be a real number: {text!r}")
    if not val > 0.0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError("tolerance must be positive and finite")
    return name, val


def _finite(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return x


def _add_global(p, suppress):
    """Global flags; repeated on each subcommand so they may follow it."""
    def dflt(value):
        return argparse.SUPPRESS if suppress else value
    p.add_argument("--seed", type=parse_seed, default=dflt(0),
                   help="64-bit unsigned RNG seed (PCG64)")
    p.add_argument("--format", choices=("json", "csv"), default=dflt("json"))
    p.add_argument("--out", metavar="PATH", default=dflt(None))
    # appended separately so flags before and after the subcommand combine
    p.add_argument("--tol", type=parse_tol, action="append", metavar="NAME=REAL",
                   dest="tol_sub" if suppress else "tol", default=dflt(None))


def _tol(args):
    pairs = list(getattr(args, "tol", None) or []) + list(getattr(args, "tol_sub", None) or [])
    return tolerances(dict(pairs))


def _add_seed_arc(p):
    g = p.add_argument_group("seed arc")
    g.add_argument("--A", type=parse_vec)
    g.add_argument("--B", type=parse_vec)
    g.add_argument("--dt", type=_finite)
    g.add_argument("--direction", choices=("ccw", "cw"), default="ccw")
    g.add_argument("--revs", type=int, default=0)
    g.add_argument("--conic", type=lambda t: parse_vec(t, 3), metavar="ALPHA,BETA,GAMMA")
    g.add_argument("--orient", type=int, choices=(1, -1), default=1)
    g.add_argument("--from", dest="s_from", type=_finite)
    g.add_argument("--to", dest="s_to", type=_finite)
    g.add_argument("--random", action="store_true", help="seed arc drawn from --seed")


def _seed_arc(args):
    if args.random:
        return random_cycle_seed(trial_rng(args.seed, 0))
    if args.conic is not None:
        if args.s_from is None or args.s_to is None:
            raise BadInput("--conic needs --from and --to")
        return conic_arc(UnifocalConic(*args.conic), args.orient, args.s_from, args.s_to)
    if args.A is None or args.B is None or args.dt is None:
        raise BadInput("give --A, --B and --dt, or --conic with --from/--to, or --random")
    return solve_lambert(args.A, args.B, args.dt, Direction.parse(args.direction), args.revs)


# ---------------------------------------------------------------------------
# commands

def _arc_record(arc):
    dt = time_of_flight(arc)
    if isinstance(arc.orbit, RectilinearOrbit):
        kind, e, gamma = "rectilinear", 1.0, 0.0
    else:
        c = arc.orbit.conic
        kind, e, gamma = c.kind, c.eccentricity, c.gamma
    try:
        label = arc_class_of(arc).label
    except ValueError:
        label = None
    return {"dt": dt, "H": arc.H, "e": e, "gamma": gamma, "kind": kind,
            "class": label, "s_A": arc.s_A, "s_B": arc.s_B,
            "revolutions": arc.revolutions}


def cmd_tof(args):
    if args.rectilinear:
        if args.H is None:
            raise BadInput("--rectilinear needs --H")
        ray = Vec2(*args.ray).unit()
        u0 = 0.0 if args.from_collision or args.s_from is None else args.s_from
        if args.to_culmination:
            if args.H >= 0.0:
                raise InfeasibleError("no culmination when H >= 0")
            u1 = math.pi
        elif args.s_to is not None:
            u1 = args.s_to
        else:
            raise BadInput("give --to or --to-culmination")
        arc = rectilinear_arc(ray, args.H, u0, u1)
    elif args.state is not None:
        st = StateVector(Vec2(*args.state[:2]), Vec2(*args.state[2:]))
        orbit = orbit_from_state(st)
        s0 = anomaly_of_state(orbit, st)
        if args.turns is not None:
            s1 = s0 + TWO_PI * args.turns
        elif args.ds is not None:
            s1 = s0 + args.ds
        else:
            raise BadInput("--state needs --turns or --ds")
        if isinstance(orbit, RectilinearOrbit):
            arc = rectilinear_arc(orbit.ray, orbit.H, s0, s1)
        else:
            arc = conic_arc(orbit.conic, orbit.orientation, s0, s1)
    elif args.conic is not None:
        if args.s_from is None:
            raise BadInput("--conic needs --from")
        if args.s_to is not None:
            s1 = args.s_to
        elif args.turns is not None:
            s1 = args.s_from + TWO_PI * args.turns
        else:
            raise BadInput("--conic needs --to or --turns")
        arc = conic_arc(UnifocalConic(*args.conic), args.orient, args.s_from, s1)
    else:
        raise BadInput("give --state, --conic or --rectilinear")
    _emit(args, render_records([_arc_record(arc)], args.format))
    return EXIT_OK


def _lambert_record(direction, arc, dt_in):
    c = arc.orbit.conic
    sA, sB = state_at(arc.orbit, arc.s_A), state_at(arc.orbit, arc.s_B)
    try:
        jac = jacobi_velocity_decomposition(arc)
        k, rho = jac.k, jac.rho
    except DegenerateError:
        k, rho = (math.nan, math.nan), math.nan
    dt = time_of_flight(arc)
    rec = {"direction": direction, "alpha": c.alpha, "beta": c.beta, "gamma": c.gamma,
           "e": c.eccentricity, "kind": c.kind, "H": arc.H,
           "vA_x": sA.v.x, "vA_y": sA.v.y, "vB_x": sB.v.x, "vB_y": sB.v.y,
           "k_x": k[0], "k_y": k[1], "rho": rho, "dt": dt,
           "residual": abs(dt - dt_in), "revolutions": arc.revolutions}
    try:
        rec["class"] = arc_class_of(arc).label
    except ValueError:
        rec["class"] = None
    return rec


def cmd_lambert(args):
    if args.A is None or args.B is None or args.dt is None:
        raise BadInput("lambert needs --A, --B and --dt")
    dirs = ("ccw", "cw") if args.direction == "both" else (args.direction,)
    recs = []
    for d in dirs:
        arc = solve_lambert(args.A, args.B, args.dt, Direction.parse(d), args.revs,
                            args.long_period)
        recs.append(_lambert_record(d, arc, args.dt))
    _emit(args, render_records(recs, args.format))
    return EXIT_OK


def cmd_cycle(args):
    tol = _tol(args)
    cycle = cycle_from_arc(_seed_arc(args))
    rep = cycle_invariant_report(cycle, args.samples, refine=args.refine, with_reflected=True)
    dev = rep.deviations
    ok = (dev["dt"] < tol["dt_invariance"]
          and max(dev["chord"], dev["radii_sum"], dev["H"]) < tol["metric_invariance"]
          and rep.class_consistent)
    summary = {"record": "summary", "M": cycle.M, "N": cycle.N, "rho": cycle.rho,
               "half_chord": cycle.half_chord, "H": cycle.H, "phi_seed": cycle.phi_gamma,
               "class": cycle.arc_class.label, "degenerate": rep.degenerate}
    for k, v in dev.items():
        summary["dev_" + k] = v
    for k, v in rep.limit_dt_deviation.items():
        summary["limit_" + k] = v
    summary["class_consistent"] = rep.class_consistent
    summary["passed"] = ok
    recs = [summary]
    for row in rep.rows:
        recs.append({"record": "arc", "phi": row["phi"], "chord": row["chord"],
                     "radii_sum": row["radii_sum"], "H": row["H"], "dt": row["dt"],
                     "C_over_sin": row["C_over_sin"], "area_over_sin": row["area_over_sin"]})
    for end, phi in (("phi_to_0", 0.0), ("phi_to_pi", math.pi)):
        lim = rectilinear_limit(cycle, end)
        recs.append({"record": "limit", "phi": phi, "H": lim.H, "dt": time_of_flight(lim),
                     "class": arc_class_of(lim).label})
    _emit(args, render_records(recs, args.format))
    if args.emit_svg:
        with open(args.emit_svg, "w", encoding="utf-8", newline="") as fh:
            fh.write(figure_cycle(cycle))
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_verify(args):
    tol = _tol(args)
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    recs = []
    ok = True
    for name in names:
        res = run_suite(name, args.trials, args.seed, tol)
        ok = ok and res.passed
        for c in res.checks:
            recs.append({"record": "check", "suite": name, "check": c.name, "value": c.value,
                         "tol": c.tol, "count": c.count,
                         "bound": "min" if c.higher_is_better else "max", "passed": c.passed})
        for row in res.table:
            recs.append({"record": "table", "suite": name, **row})
        recs.append({"record": "suite", "suite": name, "trials": res.trials,
                     "seed": res.seed, "passed": res.passed})
    _emit(args, render_records(recs, args.format))
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_plot(args):
    if args.fig == "chord-family":
        if args.A is None or args.B is None:
            raise BadInput("chord-family needs --A and --B")
        svg = figure_chord_family(args.A, args.B)
    else:
        cycle = cycle_from_arc(_seed_arc(args))
        fig = {"equal-invariant": figure_equal_invariant, "moving-foci": figure_moving_foci,
               "cycle": figure_cycle}[args.fig]
        svg = fig(cycle)
    _emit(args, svg)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="keplambert",
                                description="Planar Kepler problem and Lambert cycles")
    _add_global(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tof", help="elapsed time along an arc")
    _add_global(t, suppress=True)
    t.add_argument("--state", type=lambda s: parse_vec(s, 4), metavar="X,Y,VX,VY")
    t.add_argument("--turns", type=_finite, help="anomaly interval in turns")
    t.add_argument("--ds", type=_finite, help="anomaly interval")
    t.add_argument("--conic", type=lambda s: parse_vec(s, 3), metavar="ALPHA,BETA,GAMMA")
    t.add_argument("--orient", type=int, choices=(1, -1), default=1)
    t.add_argument("--from", dest="s_from", type=_finite)
    t.add_argument("--to", dest="s_to", type=_finite)
    t.add_argument("--rectilinear", action="store_true")
    t.add_argument("--H", type=_finite)
    t.add_argument("--ray", type=parse_vec, default=[1.0, 0.0])
    t.add_argument("--from-collision", action="store_true")
    t.add_argument("--to-culmination", action="store_true")
    t.set_defaults(func=cmd_tof)

    lam = sub.add_parser("lambert", help="arc from A to B in a given time")
    _add_global(lam, suppress=True)
    lam.add_argument("--A", type=parse_vec)
    lam.add_argument("--B", type=parse_vec)
    lam.add_argument("--dt", type=_finite)
    lam.add_argument("--direction", choices=("ccw", "cw", "both"), default="both")
    lam.add_argument("--revs", type=int, default=0)
    lam.add_argument("--long-period", action="store_true")
    lam.set_defaults(func=cmd_lambert)

    cyc = sub.add_parser("cycle", help="invariants over the Lambert cycle of an arc")
    _add_global(cyc, suppress=True)
    _add_seed_arc(cyc)
    cyc.add_argument("--samples", type=int, default=20)
    cyc.add_argument("--refine", type=int, default=2)
    cyc.add_argument("--emit-svg", metavar="PATH")
    cyc.set_defaults(func=cmd_cycle)

    ver = sub.add_parser("verify", help="seeded property suites")
    _add_global(ver, suppress=True)
    ver.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    ver.add_argument("--trials", type=int)
    ver.set_defaults(func=cmd_verify)

    plt = sub.add_parser("plot", help="SVG figures")
    _add_global(plt, suppress=True)
    plt.add_argument("--fig", required=True,
                     choices=("chord-family", "equal-invariant", "moving-foci", "cycle"))
    _add_seed_arc(plt)
    plt.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_INPUT
    if getattr(args, "trials", None) is not None and args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_BAD_INPUT
    if getattr(args, "samples", None) is not None and args.samples < 8:
        print("error: --samples must be >= 8", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except KeplerError as exc:
        # library errors (same ray, out of reach, no convergence): no result exists
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
