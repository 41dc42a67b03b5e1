"""Compare the compiled estimator core against the pure-Python fallback.

Two measurements:

* a microbenchmark driving both cores directly with the same stream of
  arrivals, completions, and admission draws,
* an end-to-end scenario run, where the pure backend is forced in a child
  process via ``OFFLOADSIM_PURE_PYTHON=1``.

Run from the repository root::

    python benchmarks/bench_estimator.py [--events 200000] [--runs 3]
"""

import argparse
import os
import random
import subprocess
import sys
import time

from offloadsim._estimator_py import EstimatorCore as PureCore

try:
    from offloadsim._estimator_cy import EstimatorCore as CompiledCore
except ImportError:
    CompiledCore = None


def make_stream(events, seed=7):
    rng = random.Random(seed)
    stream = []
    t = 0.0
    for _ in range(events):
        t += rng.expovariate(1000.0)
        stream.append((t, rng.expovariate(800.0), rng.uniform(0.5, 2.0)))
    return stream


def drive(core_cls, stream, k=128):
    core = core_cls(k=k)
    sink = 0.0
    started = time.perf_counter()
    for t, exec_time, cpu in stream:
        core.record_arrival(t)
        core.record_completion(exec_time, cpu, 0.0)
        sink += core.execution_probability(4.0, 4.0)
    elapsed = time.perf_counter() - started
    return elapsed, sink


def bench_micro(events, runs):
    stream = make_stream(events)
    rows = []
    for label, cls in (("pure-python", PureCore), ("compiled", CompiledCore)):
        if cls is None:
            print(f"{label:12s}  (extension not built, skipped)")
            continue
        best, checksum = min(drive(cls, stream) for _ in range(runs))
        rate = events / best
        rows.append((label, best, rate, checksum))
        print(f"{label:12s}  {best:7.3f} s  {rate:12,.0f} events/s  checksum {checksum:.6f}")
    if len(rows) == 2:
        checksums = {f"{row[3]:.12e}" for row in rows}
        agreement = "identical" if len(checksums) == 1 else "DIVERGENT"
        print(f"speedup: {rows[0][1] / rows[1][1]:.1f}x  (admission checksums {agreement})")


def bench_scenario(runs):
    snippet = (
        "import time; from offloadsim import simulator as s; from offloadsim import workload as w; "
        "cfg = s.PRESETS['overload-line'](); t0 = time.perf_counter(); s.run_scenario(cfg); "
        "print(w.estimator_backend(), time.perf_counter() - t0)"
    )
    for forced in (None, "1"):
        env = dict(os.environ)
        env.pop("OFFLOADSIM_PURE_PYTHON", None)
        if forced:
            env["OFFLOADSIM_PURE_PYTHON"] = forced
        best = None
        backend = "?"
        for _ in range(runs):
            out = subprocess.run(
                [sys.executable, "-c", snippet], env=env, capture_output=True, text=True, check=True
            )
            backend, elapsed = out.stdout.split()
            value = float(elapsed)
            best = value if best is None else min(best, value)
        print(f"scenario overload-line  backend={backend:12s}  best of {runs}: {best:.3f} s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=200_000, help="microbenchmark stream length")
    parser.add_argument("--runs", type=int, default=3, help="repetitions, best time wins")
    args = parser.parse_args()
    print(f"microbenchmark: {args.events:,} arrival/completion/probability rounds")
    bench_micro(args.events, args.runs)
    print()
    bench_scenario(args.runs)


if __name__ == "__main__":
    main()
