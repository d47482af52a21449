#!/usr/bin/env python3
"""Benchmark the compiled simulation kernel against the pure-Python fallback.

The workload mirrors calibration: thousands of ~190-day trajectory evaluations
on a province-sized population. Run from the repo root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from epiward import _simcore_py
from epiward.presets import synthetic_population, synthetic_rates

try:
    from epiward import _simcore
except ImportError:
    _simcore = None


def workload(n_runs: int, horizon: int):
    rng = np.random.default_rng(7)
    state0 = synthetic_population().initial_state.as_array()
    base = synthetic_rates().as_array()
    matrices = []
    for _ in range(n_runs):
        matrix = np.tile(base, (horizon, 1))
        matrix[:, 0] *= rng.uniform(0.5, 1.5)
        matrices.append(matrix)
    return state0, matrices


def bench(kernel, state0, matrices, p_total: float) -> float:
    started = time.perf_counter()
    sink = 0.0
    for matrix in matrices:
        path = kernel.simulate_path(state0, matrix, p_total)
        sink += path[-1, 3]
    elapsed = time.perf_counter() - started
    assert np.isfinite(sink)
    return elapsed


def main() -> None:
    n_runs, horizon = 2000, 190
    p_total = synthetic_population().p_total
    state0, matrices = workload(n_runs, horizon)
    print(f"workload: {n_runs} simulations x {horizon} days")

    py = bench(_simcore_py, state0, matrices, p_total)
    print(f"pure-python kernel : {py:8.3f} s  ({n_runs / py:8.0f} runs/s)")

    if _simcore is None:
        print("compiled kernel    : not built (pip install -e . --no-build-isolation)")
        return
    cy = bench(_simcore, state0, matrices, p_total)
    print(f"compiled kernel    : {cy:8.3f} s  ({n_runs / cy:8.0f} runs/s)")
    print(f"speedup            : {py / cy:8.1f}x")

    sample = matrices[0]
    a = _simcore.simulate_path(state0, sample, p_total)
    b = _simcore_py.simulate_path(state0, sample, p_total)
    print(f"bit-identical      : {bool((a == b).all())}")


if __name__ == "__main__":
    main()
