#!/usr/bin/env python3
"""Benchmark the compiled flight-rollout kernel against the pure-NumPy
fallback.

Runs the same deterministic rollout through both backends, checks they
agree, and reports wall-clock timings. The compiled path is what
``swarmform`` uses by default; setting SWARMFORM_DISABLE_NUMBA selects
the fallback at import time (this script calls both directly, so no
environment juggling is needed).

Usage:
    python3 scripts/benchmark_rollout.py [--uavs 6] [--steps 6000] [--repeats 5]
"""

import argparse
import statistics
import time

import numpy as np

from swarmform import kernels
from swarmform.flight import ControlGains, FormationPlan


def make_args(n_uavs: int, steps: int, controller: int):
    rng = np.random.default_rng(0)
    slots = rng.uniform(-10.0, 10.0, (n_uavs, 3))
    plan = FormationPlan(slots=slots)
    gains = ControlGains()
    masses, adj = gains.resolved(n_uavs)
    positions = rng.uniform(-15.0, 15.0, (n_uavs, 3))
    velocities = np.zeros((n_uavs, 3))
    return (positions, velocities, slots, adj, masses, gains.leader,
            controller, gains.k1, gains.k2, gains.kp,
            10.0, 5.0, 2.0, np.zeros(3), np.array([0.5, 0.3, 0.0]),
            0.01, steps)


def bench(fn, args, repeats: int) -> list[float]:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return times


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--uavs", type=int, default=6)
    ap.add_argument("--steps", type=int, default=6000)
    ap.add_argument("--repeats", type=int, default=5)
    opts = ap.parse_args()

    if not kernels.NUMBA_ENABLED:
        print("numba backend unavailable (disabled or import failed); "
              "benchmarking the fallback against itself is pointless.")
        return 1

    compiled = kernels.rollout
    fallback = kernels._rollout_numpy

    print(f"rollout: {opts.uavs} UAVs, {opts.steps} steps x {opts.repeats} repeats")
    for name, ctrl in (("log", kernels.CTRL_LOG), ("quad", kernels.CTRL_QUAD),
                       ("apf", kernels.CTRL_APF)):
        args = make_args(opts.uavs, opts.steps, ctrl)
        P1, _, _, L1 = compiled(*args)
        P2, _, _, L2 = fallback(*args)
        assert np.allclose(P1, P2, atol=1e-10), f"{name}: backends disagree"
        assert np.allclose(L1, L2, atol=1e-10), f"{name}: Lyapunov traces disagree"

        t_c = bench(compiled, args, opts.repeats)
        t_f = bench(fallback, args, opts.repeats)
        mc, mf = statistics.median(t_c), statistics.median(t_f)
        print(f"  {name:>4}: compiled {mc * 1e3:8.2f} ms | "
              f"numpy {mf * 1e3:8.2f} ms | speedup {mf / mc:5.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
