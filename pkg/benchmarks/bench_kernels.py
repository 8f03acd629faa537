"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Prints one JSON line per (kernel, backend) with the best time per call and
the speedup of each backend relative to the pure-Python one.
"""
import argparse
import json
import math
import timeit

import numpy as np

from keplambert.kernels import available_backends


def cases(rng, n):
    e_ell = rng.uniform(0.0, 0.99, n)
    e_hyp = rng.uniform(1.01, 5.0, n)
    M = rng.uniform(-math.pi, math.pi, n)
    conics = []
    for _ in range(n):
        e = rng.uniform(0.0, 2.0)
        th = rng.uniform(0.0, 2.0 * math.pi)
        g = rng.uniform(0.2, 3.0)
        conics.append((e * math.cos(th), e * math.sin(th), g, e * e - 1.0, 1.0))
    return e_ell, e_hyp, M, conics


def workloads(mod, data):
    e_ell, e_hyp, M, conics = data

    def kepler_elliptic():
        for m, e in zip(M, e_ell):
            mod.kepler_elliptic(float(m), float(e))

    def kepler_hyperbolic():
        for m, e in zip(M, e_hyp):
            mod.kepler_hyperbolic(float(5.0 * m), float(e))

    def conic_tof():
        for c in conics:
            mod.conic_tof(*c, -0.5, 0.7)

    def conic_state():
        for c in conics:
            mod.conic_state(*c, 0.3)

    def propagate():
        # one period of a moderately eccentric orbit
        mod.propagate(1.0, 0.0, 0.0, 1.2, 0.0, 2.0 * math.pi * (1.0 / 0.56) ** 1.5,
                      1e-14, 0.01, 1e-8, 5_000_000)

    return {
        "kepler_elliptic": (kepler_elliptic, len(M)),
        "kepler_hyperbolic": (kepler_hyperbolic, len(M)),
        "conic_tof": (conic_tof, len(conics)),
        "conic_state": (conic_state, len(conics)),
        "propagate": (propagate, 1),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    data = cases(np.random.Generator(np.random.PCG64(args.seed)), args.n)
    backends = available_backends()
    timings = {}
    for name, mod in backends.items():
        for kernel, (fn, calls) in workloads(mod, data).items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            timings[(kernel, name)] = best / calls
    for (kernel, name), t in sorted(timings.items()):
        base = timings[(kernel, "python")]
        print(json.dumps({"kernel": kernel, "backend": name,
                          "seconds_per_call": float(format(t, ".3g")),
                          "speedup_vs_python": float(format(base / t, ".3g"))}))
    if "cython" not in backends:
        print(json.dumps({"note": "compiled backend not built; only pure Python timed"}))


if __name__ == "__main__":
    main()
