"""Timing comparison of the compiled kernels against the pure-numpy fallback.

Runs each workload twice in a subprocess: once normally (numba JIT) and once
with VCONE_NO_NUMBA=1. Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, time
import numpy as np
from vcone import LinearProgram, solve_lp, eigh_hermitian, hidden_influence_s
from vcone import lemma_polytope_max, seesaw_maximize, chsh
from vcone._accel import NUMBA_ENABLED

repeat = int(os.environ["BENCH_REPEAT"])
results = {"numba": NUMBA_ENABLED}

def bench(name, fn, warmup=True):
    if warmup:
        fn()   # JIT compile / cache warm
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    results[name] = min(times)

rng = np.random.default_rng(0)
A_lp = rng.normal(size=(40, 120))
x0 = np.abs(rng.normal(size=120))
b_lp = A_lp @ x0
c_lp = rng.normal(size=120)
bench("simplex_random_40x120", lambda: solve_lp(
    LinearProgram(c=c_lp, A_eq=A_lp, b_eq=b_lp)))

e = hidden_influence_s()
bench("polytope_bound_256var", lambda: lemma_polytope_max(e))

H0 = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
H = H0 + H0.conj().T
bench("jacobi_eigh_16x16", lambda: eigh_hermitian(H))

bench("seesaw_chsh_3restarts", lambda: seesaw_maximize(chsh(), restarts=3, seed=0))

print(json.dumps(results))
"""


def run_mode(no_numba, repeat):
    env = dict(os.environ, BENCH_REPEAT=str(repeat))
    if no_numba:
        env["VCONE_NO_NUMBA"] = "1"
    else:
        env.pop("VCONE_NO_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", WORKER], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5,
                    help="timed repetitions per workload (best-of is reported)")
    args = ap.parse_args()

    fast = run_mode(False, args.repeat)
    slow = run_mode(True, args.repeat)
    assert fast.pop("numba") is True, "numba unavailable; nothing to compare"
    assert slow.pop("numba") is False

    print(f"{'workload':<28} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name in fast:
        f, s = fast[name], slow[name]
        print(f"{name:<28} {f * 1e3:>8.2f}ms {s * 1e3:>8.2f}ms {s / f:>7.1f}x")


if __name__ == "__main__":
    main()
