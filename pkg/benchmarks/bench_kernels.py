"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--dims 7,31,101,211] [--sessions 300]

Prints microseconds per call for each kernel, then per full honest session.
The compiled ``mub_probs`` column is the raw O(d^2) kernel; the active
compiled backend hands large d to the FFT path (kernels.DIRECT_PROBS_MAX_D).
"""

import argparse
import timeit

import numpy as np

from vqss import kernels, qudit as qd
from vqss.protocol import SessionParams, run_honest_session


def per_call_us(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=3)) / number * 1e6


def bench_kernels(d, number=2000):
    roots = qd.space(d).roots
    amps = qd.mub_vector(qd.MubLabel.of(d, 3, 2)).amplitudes.copy()
    probs = np.empty(d)
    row = {}
    for name, mod in kernels.BACKENDS.items():
        row[name] = {
            "phase_apply": per_call_us(lambda: mod.phase_apply(amps, roots, 5, 4), number),
            "mub_fill": per_call_us(lambda: mod.mub_fill(amps, roots, 5, 4), number),
            "mub_probs": per_call_us(lambda: mod.mub_probs(amps, roots, 4, probs), number),
            "sample_index": per_call_us(lambda: mod.sample_index(np.full(d, 1.0 / d), 0.5),
                                        number),
        }
    return row


def bench_sessions(d, sessions):
    t = min(3, d - 1)
    params = SessionParams.build(d, t, min(6, d - 1))
    mod = params.d
    out = {}
    before = kernels.backend()
    for name in kernels.BACKENDS:
        kernels.use_backend(name)
        g = np.random.default_rng(0)
        out[name] = per_call_us(lambda: run_honest_session(params, (mod(1), mod(1)), g),
                                sessions)
    kernels.use_backend(before)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--dims", default="7,31,101,211")
    ap.add_argument("--sessions", type=int, default=300)
    args = ap.parse_args()
    dims = [int(v) for v in args.dims.split(",")]
    names = list(kernels.BACKENDS)
    if "compiled" not in names:
        print("compiled extension not built; only the numpy backend is available")

    print(f"{'d':>5} {'kernel':<13}" + "".join(f"{n:>12}" for n in names) + "   (us/call)")
    for d in dims:
        row = bench_kernels(d)
        for k in row[names[0]]:
            print(f"{d:>5} {k:<13}" + "".join(f"{row[n][k]:>12.2f}" for n in names))
    print()
    print(f"{'d':>5} {'session':<13}" + "".join(f"{n:>12}" for n in names) + "   (us/session)")
    for d in dims:
        row = bench_sessions(d, args.sessions)
        print(f"{d:>5} {'honest':<13}" + "".join(f"{row[n]:>12.1f}" for n in names))


if __name__ == "__main__":
    main()
