#!/usr/bin/env python3
"""Benchmark the compiled jet kernel against the pure-Python fallback.

Each workload runs in a subprocess with SASAKLAB_JETS pinned so both
backends are measured in one invocation:

    python3 benchmarks/bench_jets.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOADS = r"""
import json
import time

import numpy as np

from sasaklab import JET_BACKEND
from sasaklab.actions import TorusAction
from sasaklab.oneill import SubmersionContext
from sasaklab.reduction import ReductionSetup, build_frame
from sasaklab.structures import RoundSphereStructure, WeightedSphereStructure
from sasaklab.jets import d_scalar, jsqrt

repeat = int(__import__("os").environ.get("BENCH_REPEAT", "1"))


def timed(fn, n):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(n):
            fn()
        best = min(best, (time.perf_counter() - t0) / n)
    return best


rng = np.random.default_rng(7)
results = {"backend": JET_BACKEND}

# raw nested-dual arithmetic: mixed second derivative of a rational map
point = list(rng.standard_normal(8))
direction = list(rng.standard_normal(8))


def rational(v):
    num = v[0] * v[1] + v[2] * v[3] + 1.0
    den = jsqrt(v[4] * v[4] + v[5] * v[5] + 2.0)
    return num / den + v[6] * v[7]


def nested():
    d_scalar(lambda q: d_scalar(rational, q, direction), point, direction)


results["nested_dual_us"] = timed(nested, 200) * 1e6

# full curvature tensor on the round S^7
S7 = RoundSphereStructure(4)
p = rng.standard_normal(8); p = list(p / np.linalg.norm(p))
vecs = []
for _ in range(3):
    v = rng.standard_normal(8)
    v -= np.dot(v, p) * np.asarray(p)
    vecs.append(list(v))
results["round_curvature_ms"] = timed(
    lambda: S7.geometry.curvature(p, *vecs), 20) * 1e3

# weighted curvature: three nested levels through the jet-evaluated form
W = WeightedSphereStructure(3, [1.0, 2.0, 3.0])
q = rng.standard_normal(6); q = list(q / np.linalg.norm(q))
wv = []
for _ in range(2):
    v = rng.standard_normal(6)
    v -= np.dot(v, q) * np.asarray(q)
    wv.append(list(v))
results["weighted_sasakian_ms"] = timed(
    lambda: W.sasakian_residual(q, wv[0], wv[1]), 3) * 1e3

# quotient Sasakian residual on the pairs reduction
A = TorusAction.of([[1, 1, 0, 0], [0, 0, 1, 1]])
setup = ReductionSetup(S7, A, mu=[1.0, 1.0])
samp = setup.samples(1, seed=1)[0]
frame = build_frame(setup, samp)
ctx = SubmersionContext.from_reduction(setup, frame)
d = [list(v) for v in frame.contact_d.vectors]
results["quotient_sasakian_ms"] = timed(
    lambda: ctx.quotient_sasakian_residual(d[0], d[1]), 10) * 1e3

print(json.dumps(results))
"""


def run_backend(backend, repeat):
    env = dict(os.environ, SASAKLAB_JETS=backend, BENCH_REPEAT=str(repeat))
    proc = subprocess.run([sys.executable, "-c", WORKLOADS], env=env,
                          capture_output=True, text=True)
    if proc.returncode != 0:
        print(proc.stderr, file=sys.stderr)
        return None
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    args = ap.parse_args()

    rows = []
    for backend in ("python", "compiled"):
        out = run_backend(backend, args.repeat)
        if out is None:
            print(f"{backend}: unavailable")
            continue
        rows.append(out)

    if not rows:
        return 1
    keys = [k for k in rows[0] if k != "backend"]
    width = max(len(k) for k in keys) + 2
    header = "workload".ljust(width) + "".join(f"{r['backend']:>14}" for r in rows)
    if len(rows) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for k in keys:
        line = k.ljust(width) + "".join(f"{r[k]:>14.3f}" for r in rows)
        if len(rows) == 2 and rows[1][k] > 0:
            line += f"{rows[0][k] / rows[1][k]:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
