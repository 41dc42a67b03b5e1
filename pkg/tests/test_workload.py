"""Estimator statistics and arrival generation.

Every derived quantity is checked against a deliberately naive oracle: a
full window re-scan for the mean rate, a chunked list replay for the
smoothed completion stats, and a straight transcription of the closed-form
admission probability.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from offloadsim import workload as wl
from offloadsim._estimator_py import EstimatorCore as PureCore


def rescan_rate(timestamps, k):
    """Recompute the windowed mean rate from scratch over the last k stamps."""
    window = timestamps[-k:]
    if len(window) < 2:
        return None
    span = window[-1] - window[0]
    return (len(window) - 1) / span if span > 0.0 else math.inf


class SmoothingReplay:
    """Chunked replay of the completion smoothing: every k completions fold
    the window means into mu / cpu_avg / mem_avg with weight 0.5."""

    def __init__(self, k):
        self.k = k
        self.chunk = []
        self.mu = 0.0
        self.cpu_avg = 0.0
        self.mem_avg = 0.0

    def complete(self, exec_time, cpu, mem):
        self.chunk.append((exec_time, cpu, mem))
        if len(self.chunk) == self.k:
            mean_exec = sum(c[0] for c in self.chunk) / self.k
            self.mu = 0.5 * (self.mu + 1.0 / mean_exec)
            self.cpu_avg = 0.5 * (self.cpu_avg + sum(c[1] for c in self.chunk) / self.k)
            self.mem_avg = 0.5 * (self.mem_avg + sum(c[2] for c in self.chunk) / self.k)
            self.chunk.clear()


def q_closed_form(lambda_eff, mu, cpu_avg, mem_avg, cpu_cap, mem_cap):
    ratio = min(cpu_cap / (cpu_cap + cpu_avg), mem_cap / (mem_cap + mem_avg))
    return max(0.0, min(ratio * mu / lambda_eff, 1.0))


def test_unit_spacing_gives_unit_rate():
    st8 = wl.new_estimator(k=4)
    for t in (0.0, 1.0, 2.0, 3.0):
        wl.record_arrival(st8, t)
    assert wl.mean_arrival_rate(st8) == pytest.approx(1.0)


def test_half_second_spacing_gives_two_per_second():
    state = wl.new_estimator(k=8)
    for i in range(8):
        wl.record_arrival(state, 0.5 * i)
    assert wl.mean_arrival_rate(state) == pytest.approx(2.0)


def test_single_arrival_signals_warmup():
    state = wl.new_estimator(k=8)
    wl.record_arrival(state, 1.0)
    with pytest.raises(ValueError):
        wl.mean_arrival_rate(state)


def test_decreasing_timestamps_rejected():
    state = wl.new_estimator(k=8)
    wl.record_arrival(state, 2.0)
    with pytest.raises(ValueError):
        wl.record_arrival(state, 1.5)


def test_tiny_buffer_rejected():
    with pytest.raises(ValueError):
        wl.new_estimator(k=1)


def test_incremental_rate_matches_rescan_oracle():
    rng = random.Random(42)
    state = wl.new_estimator(k=16)
    stamps = []
    t = 0.0
    for _ in range(2000):
        t += rng.expovariate(3.0)
        stamps.append(t)
        wl.record_arrival(state, t)
        if len(stamps) >= 2:
            expected = rescan_rate(stamps, 16)
            assert wl.mean_arrival_rate(state) == pytest.approx(expected, rel=1e-9)


def test_rate_with_identical_timestamps_is_infinite():
    state = wl.new_estimator(k=4)
    for _ in range(4):
        wl.record_arrival(state, 5.0)
    assert wl.mean_arrival_rate(state) == math.inf


def test_burst_raises_delta_lambda():
    state = wl.new_estimator(k=8)
    t = 0.0
    # Two full windows of steady traffic settle lambda_prev near 1.0.
    for _ in range(16):
        wl.record_arrival(state, t)
        t += 1.0
    assert state.delta_lambda == pytest.approx(0.0, abs=1e-9)
    before = state.lambda_hat
    for _ in range(6):
        wl.record_arrival(state, t)
        t += 0.05
    assert state.lambda_hat > before
    assert state.delta_lambda > 0.0
    assert state.lambda_eff == pytest.approx(state.lambda_hat + state.delta_lambda)


def test_cold_completion_window_example():
    # First wrap folds against the cold prior of zero.
    state = wl.new_estimator(k=2)
    wl.record_completion(state, 0.5, 0.0, 0.0)
    wl.record_completion(state, 0.5, 0.0, 0.0)
    assert state.mu == pytest.approx(1.0)


def test_completion_fixed_point():
    state = wl.new_estimator(k=2)
    wl.record_completion(state, 0.5, 0.0, 0.0)
    wl.record_completion(state, 0.5, 0.0, 0.0)
    assert state.mu == pytest.approx(1.0)
    wl.record_completion(state, 1.0, 0.0, 0.0)
    wl.record_completion(state, 1.0, 0.0, 0.0)
    # mu = 0.5 * (1 + 1/1) stays at the fixed point.
    assert state.mu == pytest.approx(1.0)


def test_completion_smoothing_matches_replay_oracle():
    rng = random.Random(7)
    k = 7
    state = wl.new_estimator(k=k)
    replay = SmoothingReplay(k)
    for _ in range(10_000):
        e = rng.uniform(0.01, 2.0)
        c = rng.uniform(0.0, 4.0)
        m = rng.uniform(0.0, 1.0)
        wl.record_completion(state, e, c, m)
        replay.complete(e, c, m)
        assert state.mu == pytest.approx(replay.mu, rel=1e-12, abs=1e-15)
        assert state.cpu_avg == pytest.approx(replay.cpu_avg, rel=1e-12, abs=1e-15)
        assert state.mem_avg == pytest.approx(replay.mem_avg, rel=1e-12, abs=1e-15)


def test_invalid_completions_rejected():
    state = wl.new_estimator(k=4)
    with pytest.raises(ValueError):
        wl.record_completion(state, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        wl.record_completion(state, 1.0, -0.5, 0.0)


def test_queue_length_substitutions():
    assert wl.expected_queue_length(0.5) == pytest.approx(1.0)
    assert wl.expected_queue_length(0.0) == 0.0
    assert wl.expected_queue_length(0.9) == pytest.approx(9.0)
    assert wl.expected_queue_length(1.0) == math.inf
    assert wl.expected_queue_length(3.0) == math.inf
    with pytest.raises(ValueError):
        wl.expected_queue_length(-0.1)


def test_execution_probability_substitution():
    # Drive a real state to lambda_eff=4, mu=4, cpu_avg=2, mem_avg=0. The
    # third arrival keeps the spacing so the smoothed baseline has settled
    # and the burst increment is zero.
    state = wl.new_estimator(k=2)
    wl.record_arrival(state, 0.0)
    wl.record_arrival(state, 0.25)
    wl.record_arrival(state, 0.5)
    wl.record_completion(state, 0.125, 4.0, 0.0)
    wl.record_completion(state, 0.125, 4.0, 0.0)
    assert state.lambda_eff == pytest.approx(4.0)
    assert state.mu == pytest.approx(4.0)
    assert state.cpu_avg == pytest.approx(2.0)
    q = wl.execution_probability(state, cpu_capacity=2.0, mem_capacity=1.0)
    assert q == pytest.approx(0.5)


def test_execution_probability_cold_state_accepts_everything():
    state = wl.new_estimator(k=8)
    assert wl.execution_probability(state, 1.0, 1.0) == 1.0
    wl.record_arrival(state, 0.0)
    assert wl.execution_probability(state, 1.0, 1.0) == 1.0


def test_underutilized_probability_caps_at_one():
    # mu/lambda = 10 with resource factor 0.5 would give 5; capped to 1.
    q = wl.admission_probability(
        lambda_eff=1.0, mu=10.0, cpu_avg=1.0, mem_avg=0.0,
        cpu_capacity=1.0, mem_capacity=1.0,
    )
    assert q == 1.0


def test_admission_probability_validates_capacities():
    with pytest.raises(ValueError):
        wl.admission_probability(1.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def test_admission_probability_matches_closed_form():
    rng = random.Random(2024)
    for _ in range(1000):
        lam = rng.uniform(0.01, 50.0)
        mu = rng.uniform(0.01, 50.0)
        cpu_avg = rng.uniform(0.0, 10.0)
        mem_avg = rng.uniform(0.0, 10.0)
        cpu_cap = rng.uniform(0.1, 10.0)
        mem_cap = rng.uniform(0.1, 10.0)
        got = wl.admission_probability(lam, mu, cpu_avg, mem_avg, cpu_cap, mem_cap)
        want = q_closed_form(lam, mu, cpu_avg, mem_avg, cpu_cap, mem_cap)
        assert got == pytest.approx(want, rel=1e-12, abs=0.0)
        assert 0.0 <= got <= 1.0


def test_conservative_rate_never_raises_admission():
    rng = random.Random(99)
    for _ in range(500):
        lam = rng.uniform(0.1, 20.0)
        delta = rng.uniform(0.0, 10.0)
        mu = rng.uniform(0.1, 20.0)
        cpu_avg = rng.uniform(0.0, 5.0)
        plain = wl.admission_probability(lam, mu, cpu_avg, 0.0, 1.0, 1.0)
        conservative = wl.admission_probability(lam + delta, mu, cpu_avg, 0.0, 1.0, 1.0)
        assert conservative <= plain + 1e-12


def test_service_spec_validation():
    with pytest.raises(ValueError):
        wl.ServiceSpec(name="bad", mean_exec_time_s=0.0)
    with pytest.raises(ValueError):
        wl.ServiceSpec(name="bad", mean_exec_time_s=1.0, cpu_cost=-1.0)
    with pytest.raises(ValueError):
        wl.ServiceSpec(name="bad", mean_exec_time_s=1.0, popularity_weight=-1.0)
    with pytest.raises(ValueError):
        wl.popularity([wl.ServiceSpec(name="z", mean_exec_time_s=1.0,
                                      popularity_weight=0.0)])


@given(st.lists(st.floats(min_value=0.01, max_value=100.0), min_size=1, max_size=8))
def test_popularity_normalizes(weights):
    services = [
        wl.ServiceSpec(name=f"s{i}", mean_exec_time_s=1.0, popularity_weight=w)
        for i, w in enumerate(weights)
    ]
    probs = wl.popularity(services)
    assert sum(probs) == pytest.approx(1.0)
    assert all(p > 0.0 for p in probs)


def test_catalog_means_weighted():
    services = [
        wl.ServiceSpec(name="a", mean_exec_time_s=1.0, cpu_cost=1.0, popularity_weight=3.0),
        wl.ServiceSpec(name="b", mean_exec_time_s=2.0, cpu_cost=2.0, popularity_weight=1.0),
    ]
    cpu, mem = wl.catalog_means(services)
    assert cpu == pytest.approx(0.75 * 1.0 + 0.25 * 2.0)
    assert mem == pytest.approx(0.0)


def test_jitter_spec_validation():
    with pytest.raises(ValueError):
        wl.JitterSpec(start_ms=-1.0, duration_ms=10.0, rate_multiplier=6.0)
    with pytest.raises(ValueError):
        wl.JitterSpec(start_ms=0.0, duration_ms=0.0, rate_multiplier=6.0)
    with pytest.raises(ValueError):
        wl.JitterSpec(start_ms=0.0, duration_ms=10.0, rate_multiplier=0.0)


def test_overlapping_jitters_rejected():
    jitters = [
        wl.JitterSpec(start_ms=40.0, duration_ms=10.0, rate_multiplier=6.0),
        wl.JitterSpec(start_ms=45.0, duration_ms=10.0, rate_multiplier=6.0),
    ]
    svc = [wl.ServiceSpec(name="s", mean_exec_time_s=0.001)]
    with pytest.raises(ValueError):
        wl.poisson_stream(1000.0, 0.1, seed=1, jitters=jitters, services=svc,
                          access_points=[0])


def test_poisson_counts_within_three_sigma():
    svc = [wl.ServiceSpec(name="s", mean_exec_time_s=0.001)]
    mean, sigma = 10_000.0, 100.0
    for seed in range(6):
        events = wl.poisson_stream(1000.0, 10.0, seed=seed, jitters=[],
                                   services=svc, access_points=[0])
        assert abs(len(events) - mean) < 3.0 * sigma


def test_jitter_window_carries_sixfold_rate():
    svc = [wl.ServiceSpec(name="s", mean_exec_time_s=0.001)]
    jit = [wl.JitterSpec(start_ms=40.0, duration_ms=10.0, rate_multiplier=6.0)]
    counts = []
    for seed in range(40):
        events = wl.poisson_stream(1000.0, 0.15, seed=seed, jitters=jit,
                                   services=svc, access_points=[0])
        counts.append(sum(1 for e in events if 0.040 <= e.time_s < 0.050))
    mean = sum(counts) / len(counts)
    # Expected about 60 arrivals in the boosted window; tolerance is three
    # standard errors of the 40-seed mean.
    assert abs(mean - 60.0) < 3.0 * math.sqrt(60.0 / len(counts))


def test_same_seed_reproduces_event_list():
    svc = [
        wl.ServiceSpec(name="a", mean_exec_time_s=0.001, popularity_weight=2.0),
        wl.ServiceSpec(name="b", mean_exec_time_s=0.002, popularity_weight=1.0),
    ]
    jit = [wl.JitterSpec(start_ms=10.0, duration_ms=5.0, rate_multiplier=3.0)]
    a = wl.poisson_stream(500.0, 0.2, seed=11, jitters=jit, services=svc,
                          access_points=[0, 3])
    b = wl.poisson_stream(500.0, 0.2, seed=11, jitters=jit, services=svc,
                          access_points=[0, 3])
    assert a == b


def test_different_seeds_differ():
    svc = [wl.ServiceSpec(name="s", mean_exec_time_s=0.001)]
    a = wl.poisson_stream(500.0, 0.2, seed=1, jitters=[], services=svc,
                          access_points=[0])
    b = wl.poisson_stream(500.0, 0.2, seed=2, jitters=[], services=svc,
                          access_points=[0])
    assert a != b


def test_arrivals_sorted_and_bounded():
    svc = [wl.ServiceSpec(name="s", mean_exec_time_s=0.001)]
    events = wl.poisson_stream(2000.0, 0.5, seed=3, jitters=[], services=svc,
                               access_points=[1, 2])
    times = [e.time_s for e in events]
    assert times == sorted(times)
    assert all(0.0 <= t < 0.5 for t in times)
    assert all(e.origin in (1, 2) for e in events)


def test_estimator_memory_is_fixed_by_k():
    state = wl.new_estimator(k=32)
    rng = random.Random(5)
    t = 0.0
    for _ in range(5000):
        t += rng.expovariate(10.0)
        wl.record_arrival(state, t)
        wl.record_completion(state, rng.uniform(0.01, 1.0), 1.0, 1.0)
    assert len(list(state.buf_lambda)) == 32
    assert len(list(state.buf_mu)) == 32
    assert 0 <= state.arrival_index < 32
    assert 0 <= state.completion_index < 32


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["arrival", "completion"]),
            st.floats(min_value=0.001, max_value=1.0),
        ),
        min_size=1,
        max_size=300,
    )
)
def test_interleaved_streams_keep_invariants(ops):
    state = wl.new_estimator(k=8)
    stamps = []
    t = 0.0
    for kind, x in ops:
        if kind == "arrival":
            t += x
            wl.record_arrival(state, t)
            stamps.append(t)
        else:
            wl.record_completion(state, x, x, x / 2.0)
        assert state.delta_lambda >= 0.0
        assert 0.0 <= wl.execution_probability(state, 1.0, 1.0) <= 1.0
        if len(stamps) >= 2:
            want = rescan_rate(stamps, 8)
            assert wl.mean_arrival_rate(state) == pytest.approx(want, rel=1e-9)


@pytest.mark.skipif(
    wl.estimator_backend() != "compiled",
    reason="compiled kernel not active in this interpreter",
)
def test_compiled_kernel_replays_identically_to_pure():
    rng = random.Random(1234)
    fast = wl.new_estimator(k=16)
    slow = PureCore(16)
    t = 0.0
    for _ in range(4000):
        if rng.random() < 0.55:
            t += rng.expovariate(20.0)
            fast.record_arrival(t)
            slow.record_arrival(t)
        else:
            e = rng.uniform(0.001, 0.5)
            c = rng.uniform(0.0, 3.0)
            m = rng.uniform(0.0, 1.0)
            fast.record_completion(e, c, m)
            slow.record_completion(e, c, m)
        assert fast.lambda_hat == slow.lambda_hat
        assert fast.lambda_prev == slow.lambda_prev
        assert fast.delta_lambda == slow.delta_lambda
        assert fast.mu == slow.mu
        assert fast.cpu_avg == slow.cpu_avg
        assert fast.mem_avg == slow.mem_avg
        assert fast.execution_probability(2.0, 2.0) == slow.execution_probability(2.0, 2.0)
