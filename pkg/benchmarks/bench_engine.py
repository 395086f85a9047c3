"""Benchmark: compiled schedule-cost kernel vs the pure-NumPy fallback.

The kernel sits inside every BFGS objective evaluation, of which a full gate
optimization performs a few million, so this ratio directly scales total
optimization time. Run:

    python benchmarks/bench_engine.py
"""

import time

import numpy as np

from sfqramp.engine import HAVE_COMPILED, make_engine
from sfqramp.model import CircuitParams, diagonalize_model
from sfqramp.numerics import MinimizerOptions, minimize

REPEATS = 3


def time_call(fn, min_seconds=0.4):
    fn()  # warm up
    best = np.inf
    for _ in range(REPEATS):
        count = 0
        start = time.perf_counter()
        while True:
            fn()
            count += 1
            elapsed = time.perf_counter() - start
            if elapsed > min_seconds:
                break
        best = min(best, elapsed / count)
    return best


def bench_cost_eval(model):
    print("— single cost evaluation (6-pulse ramp, best over train lengths) —")
    rows = []
    for coupling, theta_kick in (("inductive", 0.15), ("capacitive", 0.03)):
        times = np.sort(np.random.default_rng(1).uniform(0, 3 * model.period, 6))
        variants = {"python": make_engine(model, coupling, theta_kick, np.pi, pure_python=True)}
        if HAVE_COMPILED:
            variants["compiled"] = make_engine(model, coupling, theta_kick, np.pi, pure_python=False)
        timings = {}
        for name, engine in variants.items():
            timings[name] = time_call(lambda e=engine: e.best_train(times, 3))
        line = f"  {coupling:<11}"
        for name, dt in timings.items():
            line += f"  {name}: {dt * 1e6:8.1f} us"
        if "compiled" in timings:
            line += f"  speedup: {timings['python'] / timings['compiled']:5.1f}x"
        print(line)
        rows.append(timings)
    return rows


def bench_bfgs_trial(model):
    print("— one BFGS trial (3 pulses, 2 periods, inductive) —")
    start_point = np.array([0.25, 1.05, 1.30]) * model.period
    opts = MinimizerOptions(gradient_step=1e-7 * model.period, max_iterations=200)
    for pure in (True, False) if HAVE_COMPILED else (True,):
        engine = make_engine(model, "inductive", 0.15, np.pi, pure_python=pure)

        def objective(x):
            clipped = np.sort(np.clip(x, 0, 2 * model.period - 1e-6))
            return engine.best_train(clipped, 2)[0]

        dt = time_call(lambda: minimize(objective, start_point, opts), min_seconds=1.0)
        label = "python" if pure else "compiled"
        print(f"  {label:<9} {dt * 1e3:8.1f} ms/trial")


def main():
    print(f"compiled extension available: {HAVE_COMPILED}")
    model = diagonalize_model(CircuitParams(), check_convergence=False)
    bench_cost_eval(model)
    bench_bfgs_trial(model)


if __name__ == "__main__":
    main()
