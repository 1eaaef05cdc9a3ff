"""Time every kernel under the numba and numpy implementations.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from mmhom import _kernels


@dataclass
class Timing:
    kernel: str
    backend: str
    best_s: float
    max_abs_diff: float


def _cases(rng):
    x = rng.uniform(-2.0, 2.0, 200_000)
    y = rng.uniform(-2.0, 2.0, 200_000)
    q = np.linspace(-16.0, 16.0, 64)
    v = (rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))) / 64.0
    s = rng.uniform(-1.0, 1.0, (2, 2_000))
    gates = 500_000
    photon_det = np.array([(a, b) for a in range(4) for b in range(a, 4)], dtype=np.int64)
    outcome = rng.integers(0, len(photon_det), gates)
    u_eff = rng.random((gates, 2))
    u_dark = rng.random((gates, 4))
    eff = np.full(4, 0.8)
    dark = np.full(4, 1e-3)
    return {
        "hermite": lambda k: k.hermite(12, x),
        "laguerre": lambda k: k.laguerre(6, 3, np.abs(x)),
        "hg_field": lambda k: k.hg_field(x, y, 3, 2, 0.7, 0.01, 0.3, 1.0),
        "lg_field": lambda k: k.lg_field(x, y, 2, 3, 0.7, 0.01, 0.3, 1.0),
        "fourier_sum": lambda k: k.fourier_sum(v, q, q, s[0], s[1], 0.1),
        "detect_gates": lambda k: k.detect_gates(outcome, photon_det, u_eff, u_dark, eff, dark, False),
    }


def bench(repeat=3, seed=0):
    if _kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    cases = _cases(np.random.default_rng(seed))
    # compile the numba versions outside the timed region
    for fn in cases.values():
        fn(_kernels.numba_impl)
    out = []
    for name, fn in cases.items():
        ref = fn(_kernels.numpy_impl)
        for impl in (_kernels.numpy_impl, _kernels.numba_impl):
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                res = fn(impl)
                best = min(best, time.perf_counter() - t0)
            diff = float(np.max(np.abs(np.asarray(res) - np.asarray(ref))))
            out.append(Timing(name, impl.name, best, diff))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", default=None, help="write timings as JSON")
    args = p.parse_args()
    rows = bench(args.repeat)
    print(f"{'kernel':<14}{'backend':<8}{'best [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    base = {r.kernel: r.best_s for r in rows if r.backend == "numpy"}
    for r in rows:
        print(f"{r.kernel:<14}{r.backend:<8}{1e3 * r.best_s:>12.2f}{base[r.kernel] / r.best_s:>10.1f}{r.max_abs_diff:>14.3g}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([asdict(r) for r in rows], fh, indent=2)


if __name__ == "__main__":
    main()
