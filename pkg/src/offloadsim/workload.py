"""Request workload model and per-node arrival/service estimation.

Two halves live here:

* ``EstimatorState`` plus the functional wrappers (``record_arrival``,
  ``mean_arrival_rate``, ``record_completion``, ``execution_probability``,
  ``expected_queue_length``). The state class is a compiled Cython kernel
  when available, with a pure-Python twin as fallback; set
  ``OFFLOADSIM_PURE_PYTHON=1`` before import to force the fallback.

* The request source: a service catalog with popularity weights and
  ``poisson_stream``, which samples (possibly jittered) Poisson arrival
  times, service picks, and origin access points from a seeded RNG.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field

from ._estimator_py import ARMA_WEIGHT
from ._estimator_py import EstimatorCore as _PyEstimatorCore
from ._estimator_py import admission_probability

if os.environ.get("OFFLOADSIM_PURE_PYTHON"):
    _CoreImpl = _PyEstimatorCore
    _BACKEND = "pure-python"
else:
    try:
        from ._estimator_cy import EstimatorCore as _CyEstimatorCore

        _CoreImpl = _CyEstimatorCore
        _BACKEND = "compiled"
    except ImportError:
        _CoreImpl = _PyEstimatorCore
        _BACKEND = "pure-python"

#: The class actually used for estimator state (backend dependent).
EstimatorState = _CoreImpl


def estimator_backend() -> str:
    """Which estimator kernel is active: 'compiled' or 'pure-python'."""
    return _BACKEND


def new_estimator(k: int = 128) -> EstimatorState:
    """Fresh estimator with circular buffers of size k (k >= 2)."""
    return _CoreImpl(k)


def record_arrival(state: EstimatorState, timestamp: float) -> EstimatorState:
    """Push one arrival timestamp (seconds, non-decreasing) and refresh the
    rate estimates. Returns the same (mutated) state for chaining."""
    state.record_arrival(timestamp)
    return state


def record_completion(
    state: EstimatorState, exec_time: float, cpu_cost: float, mem_cost: float
) -> EstimatorState:
    """Push one completed execution (duration seconds, resource demands)."""
    state.record_completion(exec_time, cpu_cost, mem_cost)
    return state


def mean_arrival_rate(state: EstimatorState) -> float:
    """Windowed mean rate: (valid-1) intervals over the buffer span.

    Raises ValueError until two arrivals have been seen; identical
    timestamps across the whole window yield inf.
    """
    return state.mean_arrival_rate()


def execution_probability(
    state: EstimatorState, cpu_capacity: float, mem_capacity: float
) -> float:
    """Admission probability q in [0, 1]; 1.0 while the state is cold."""
    return state.execution_probability(cpu_capacity, mem_capacity)


def expected_queue_length(rho: float) -> float:
    """Stationary mean number in system for utilization rho = lambda/mu.

    rho >= 1 has no stationary regime; inf signals the unstable case.
    """
    if rho < 0.0:
        raise ValueError("utilization must be non-negative")
    if rho >= 1.0:
        return math.inf
    return rho / (1.0 - rho)


@dataclass(frozen=True)
class ServiceSpec:
    """One entry of the service catalog offered by executor nodes."""

    name: str
    mean_exec_time_s: float
    cpu_cost: float = 1.0
    mem_cost: float = 0.0
    popularity_weight: float = 1.0

    def __post_init__(self):
        if self.mean_exec_time_s <= 0.0:
            raise ValueError(f"service {self.name!r}: mean_exec_time_s must be positive")
        if self.cpu_cost < 0.0 or self.mem_cost < 0.0:
            raise ValueError(f"service {self.name!r}: resource costs must be non-negative")
        if self.popularity_weight < 0.0:
            raise ValueError(f"service {self.name!r}: popularity_weight must be non-negative")


def popularity(services: list[ServiceSpec]) -> list[float]:
    """Normalized popularity shares (sums to 1)."""
    total = sum(s.popularity_weight for s in services)
    if total <= 0.0:
        raise ValueError("popularity weights must not all be zero")
    return [s.popularity_weight / total for s in services]


def catalog_means(services: list[ServiceSpec]) -> tuple[float, float]:
    """Popularity-weighted mean cpu and memory demand of the catalog."""
    shares = popularity(services)
    cpu = sum(p * s.cpu_cost for p, s in zip(shares, services))
    mem = sum(p * s.mem_cost for p, s in zip(shares, services))
    return cpu, mem


@dataclass(frozen=True)
class JitterSpec:
    """A rate surge window: inside [start, start+duration) the Poisson rate
    becomes rate_multiplier x the configured base rate."""

    start_ms: float
    duration_ms: float
    rate_multiplier: float

    def __post_init__(self):
        if self.start_ms < 0.0:
            raise ValueError("jitter start must be non-negative")
        if self.duration_ms <= 0.0:
            raise ValueError("jitter duration must be positive")
        if self.rate_multiplier <= 0.0:
            raise ValueError("jitter rate multiplier must be positive")

    @property
    def end_ms(self) -> float:
        return self.start_ms + self.duration_ms


def _validate_jitters(jitters: list[JitterSpec]) -> list[JitterSpec]:
    ordered = sorted(jitters, key=lambda j: j.start_ms)
    for a, b in zip(ordered, ordered[1:]):
        if b.start_ms < a.end_ms:
            raise ValueError(
                f"jitter windows overlap: [{a.start_ms}, {a.end_ms}) and "
                f"[{b.start_ms}, {b.end_ms}) ms"
            )
    return ordered


@dataclass
class ArrivalEvent:
    """One external request arrival produced by the stream."""

    time_s: float
    service_index: int
    origin: int


def _segment_boundaries(jitters: list[JitterSpec], horizon_s: float) -> list[tuple[float, float]]:
    """Piecewise-constant rate segments as (start_s, multiplier)."""
    segs: list[tuple[float, float]] = [(0.0, 1.0)]
    for j in jitters:
        start = j.start_ms / 1000.0
        end = j.end_ms / 1000.0
        if start >= horizon_s:
            continue
        segs.append((start, j.rate_multiplier))
        if end < horizon_s:
            segs.append((end, 1.0))
    segs.sort(key=lambda t: t[0])
    return segs


def _iter_arrival_tuples(
    rate_per_s: float,
    horizon_s: float,
    seed,
    jitters: list[JitterSpec] | None = None,
    services: list[ServiceSpec] | None = None,
    access_points: list[int] | None = None,
):
    """Yields raw (time_s, service_index, origin) tuples; shared core for
    the public stream API and the simulator's hot loop."""
    if rate_per_s <= 0.0:
        raise ValueError("arrival rate must be positive")
    if horizon_s <= 0.0:
        raise ValueError("horizon must be positive")
    jitters = _validate_jitters(list(jitters or []))
    segs = _segment_boundaries(jitters, horizon_s)

    rng = random.Random(f"{seed}|arrivals")
    expovariate = rng.expovariate
    uniform = rng.random
    randrange = rng.randrange

    cum: list[float] = []
    total_w = 0.0
    if services is not None:
        for s in services:
            total_w += s.popularity_weight
            cum.append(total_w)
        if total_w <= 0.0:
            raise ValueError("popularity weights must not all be zero")
    if access_points is not None and not access_points:
        raise ValueError("access point list must not be empty")
    n_ap = len(access_points) if access_points is not None else 0

    t = 0.0
    seg_i = 0
    last_seg = len(segs) - 1
    while True:
        # The exponential gap is memoryless, so on crossing a rate boundary
        # the residual wait can be redrawn at the new rate without bias.
        while True:
            gap = expovariate(rate_per_s * segs[seg_i][1])
            nxt = t + gap
            if seg_i < last_seg and nxt >= segs[seg_i + 1][0]:
                seg_i += 1
                t = segs[seg_i][0]
                continue
            t = nxt
            break
        if t >= horizon_s:
            return
        svc = 0
        if cum:
            u = uniform() * total_w
            for svc, edge in enumerate(cum):
                if u < edge:
                    break
        origin = access_points[randrange(n_ap)] if n_ap else 0
        yield (t, svc, origin)


def iter_poisson_arrivals(
    rate_per_s: float,
    horizon_s: float,
    seed,
    jitters: list[JitterSpec] | None = None,
    services: list[ServiceSpec] | None = None,
    access_points: list[int] | None = None,
):
    """Lazy generator behind ``poisson_stream`` (same arguments)."""
    for t, svc, origin in _iter_arrival_tuples(
        rate_per_s, horizon_s, seed, jitters, services, access_points
    ):
        yield ArrivalEvent(t, svc, origin)


def poisson_stream(
    rate_per_s: float,
    horizon_s: float,
    seed,
    jitters: list[JitterSpec] | None = None,
    services: list[ServiceSpec] | None = None,
    access_points: list[int] | None = None,
) -> list[ArrivalEvent]:
    """Materialized arrival list over [0, horizon).

    Same seed and arguments always reproduce the identical list; jitter
    windows multiply the base rate while active and must not overlap.
    """
    return list(
        iter_poisson_arrivals(rate_per_s, horizon_s, seed, jitters, services, access_points)
    )


__all__ = [
    "ARMA_WEIGHT",
    "ArrivalEvent",
    "EstimatorState",
    "JitterSpec",
    "ServiceSpec",
    "admission_probability",
    "catalog_means",
    "estimator_backend",
    "execution_probability",
    "expected_queue_length",
    "iter_poisson_arrivals",
    "mean_arrival_rate",
    "new_estimator",
    "poisson_stream",
    "popularity",
    "record_arrival",
    "record_completion",
]
