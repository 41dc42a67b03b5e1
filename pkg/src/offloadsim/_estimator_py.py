"""Pure-Python estimator core (reference implementation).

Keeps per-node arrival/completion statistics inside fixed circular buffers of
size k and derives, in O(1) per event:

* the windowed mean arrival rate (k-1 intervals over the buffer span),
* the smoothed historical rate and its positive increment (burst detector),
* the smoothed service rate and mean per-request cpu/memory demand,
* the admission probability q used by the proactive strategy.

The compiled twin in ``_estimator_cy.pyx`` mirrors this class exactly; any
semantic change here must be ported there (tests replay both side by side).
"""

import math

NAN = float("nan")
INF = float("inf")

ARMA_WEIGHT = 0.5


def admission_probability(
    lambda_eff: float,
    mu: float,
    cpu_avg: float,
    mem_avg: float,
    cpu_capacity: float,
    mem_capacity: float,
) -> float:
    """Closed-form admission probability, capped into [0, 1].

    q = min(cpu_cap/(cpu_cap+cpu_avg), mem_cap/(mem_cap+mem_avg)) * mu/lambda_eff

    A zero mean demand leaves the corresponding headroom ratio at 1; a
    non-positive effective arrival rate means no observed pressure, so q = 1.
    """
    if cpu_capacity <= 0.0 or mem_capacity <= 0.0:
        raise ValueError("capacities must be positive")
    if lambda_eff <= 0.0:
        return 1.0
    headroom = min(
        cpu_capacity / (cpu_capacity + cpu_avg),
        mem_capacity / (mem_capacity + mem_avg),
    )
    q = headroom * (mu / lambda_eff)
    if q >= 1.0:
        return 1.0
    if q <= 0.0:
        return 0.0
    return q


class EstimatorCore:
    """Circular-buffer statistics for one node.

    Not thread safe; one instance per simulated node. Timestamps are seconds
    and must be non-decreasing per stream.
    """

    __slots__ = (
        "k",
        "buf_lambda",
        "buf_mu",
        "buf_cpu",
        "buf_mem",
        "arrival_index",
        "completion_index",
        "arrival_count",
        "completion_count",
        "arrival_wraps",
        "completion_wraps",
        "interval_sum",
        "last_arrival",
        "lambda_hat",
        "lambda_prev",
        "delta_lambda",
        "lambda_eff",
        "mu",
        "cpu_avg",
        "mem_avg",
    )

    def __init__(self, k: int = 128):
        if k < 2:
            raise ValueError("buffer size k must be at least 2")
        self.k = k
        self.buf_lambda = [NAN] * k
        self.buf_mu = [NAN] * k
        self.buf_cpu = [NAN] * k
        self.buf_mem = [NAN] * k
        self.arrival_index = 0
        self.completion_index = 0
        self.arrival_count = 0
        self.completion_count = 0
        self.arrival_wraps = 0
        self.completion_wraps = 0
        self.interval_sum = 0.0
        self.last_arrival = NAN
        self.lambda_hat = 0.0
        self.lambda_prev = 0.0
        self.delta_lambda = 0.0
        self.lambda_eff = 0.0
        self.mu = 0.0
        self.cpu_avg = 0.0
        self.mem_avg = 0.0

    def record_arrival(self, timestamp: float) -> None:
        k = self.k
        count = self.arrival_count
        idx = self.arrival_index
        if count > 0:
            if timestamp < self.last_arrival:
                raise ValueError(
                    f"arrival timestamps must be non-decreasing "
                    f"({timestamp!r} after {self.last_arrival!r})"
                )
            z = timestamp - self.last_arrival
            if count >= k:
                # Slot idx holds the oldest timestamp; evicting it removes the
                # interval between it and its successor from the window sum.
                buf = self.buf_lambda
                y = buf[(idx + 1) % k] - buf[idx]
                self.interval_sum += z - y
            else:
                self.interval_sum += z
        self.buf_lambda[idx] = timestamp
        self.last_arrival = timestamp
        self.arrival_count = count + 1
        idx += 1
        if idx == k:
            idx = 0
        self.arrival_index = idx

        valid = count + 1
        if valid > k:
            valid = k
        if valid >= 2:
            s = self.interval_sum
            self.lambda_hat = (valid - 1) / s if s > 0.0 else INF
        d = self.lambda_hat - self.lambda_prev
        self.delta_lambda = d if d > 0.0 else 0.0
        self.lambda_eff = self.lambda_hat + self.delta_lambda

        if idx == 0:  # buffer wrapped on this arrival
            self.arrival_wraps += 1
            if self.arrival_wraps == 1:
                # No defined prior for the historical rate; adopting the
                # current estimate avoids a spurious burst signal at warm-up.
                self.lambda_prev = self.lambda_hat
            else:
                self.lambda_prev = ARMA_WEIGHT * (self.lambda_prev + self.lambda_hat)

    def record_completion(self, exec_time: float, cpu_cost: float, mem_cost: float) -> None:
        if exec_time <= 0.0 or math.isnan(exec_time):
            raise ValueError("execution time must be positive")
        if cpu_cost < 0.0 or mem_cost < 0.0:
            raise ValueError("resource costs must be non-negative")
        k = self.k
        idx = self.completion_index
        self.buf_mu[idx] = exec_time
        self.buf_cpu[idx] = cpu_cost
        self.buf_mem[idx] = mem_cost
        self.completion_count += 1
        idx += 1
        if idx == k:
            idx = 0
        self.completion_index = idx
        if idx == 0:  # buffer full: fold window means into the smoothed stats
            self.completion_wraps += 1
            mean_exec = sum(self.buf_mu) / k
            self.mu = ARMA_WEIGHT * (self.mu + 1.0 / mean_exec)
            self.cpu_avg = ARMA_WEIGHT * (self.cpu_avg + sum(self.buf_cpu) / k)
            self.mem_avg = ARMA_WEIGHT * (self.mem_avg + sum(self.buf_mem) / k)

    def mean_arrival_rate(self) -> float:
        valid = self.arrival_count
        if valid > self.k:
            valid = self.k
        if valid < 2:
            raise ValueError("need at least two arrivals to estimate a rate")
        s = self.interval_sum
        return (valid - 1) / s if s > 0.0 else INF

    def is_warm(self) -> bool:
        """True once both buffers carry a full window of history."""
        return self.arrival_count >= self.k and self.completion_wraps >= 1

    def execution_probability(self, cpu_capacity: float, mem_capacity: float) -> float:
        if not self.is_warm():
            return 1.0
        return admission_probability(
            self.lambda_eff, self.mu, self.cpu_avg, self.mem_avg,
            cpu_capacity, mem_capacity,
        )
