# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled estimator core.

Semantics mirror ``_estimator_py.EstimatorCore`` field for field; the pure
class is the reference and the replay test drives both with identical event
streams. Buffers live in malloc'd C arrays; the list-returning properties
exist for introspection and tests, not hot paths.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport isnan, NAN as C_NAN

cdef double INF = float("inf")
cdef double ARMA_WEIGHT = 0.5


cpdef double admission_probability(
    double lambda_eff,
    double mu,
    double cpu_avg,
    double mem_avg,
    double cpu_capacity,
    double mem_capacity,
):
    """Same closed form as the pure module; kept callable for benchmarks."""
    if cpu_capacity <= 0.0 or mem_capacity <= 0.0:
        raise ValueError("capacities must be positive")
    if lambda_eff <= 0.0:
        return 1.0
    cdef double hc = cpu_capacity / (cpu_capacity + cpu_avg)
    cdef double hm = mem_capacity / (mem_capacity + mem_avg)
    cdef double q = (hc if hc < hm else hm) * (mu / lambda_eff)
    if q >= 1.0:
        return 1.0
    if q <= 0.0:
        return 0.0
    return q


cdef class EstimatorCore:
    cdef double* _buf_lambda
    cdef double* _buf_mu
    cdef double* _buf_cpu
    cdef double* _buf_mem
    cdef public int k
    cdef public int arrival_index
    cdef public int completion_index
    cdef public long arrival_count
    cdef public long completion_count
    cdef public long arrival_wraps
    cdef public long completion_wraps
    cdef public double interval_sum
    cdef public double last_arrival
    cdef public double lambda_hat
    cdef public double lambda_prev
    cdef public double delta_lambda
    cdef public double lambda_eff
    cdef public double mu
    cdef public double cpu_avg
    cdef public double mem_avg

    def __cinit__(self, int k=128):
        if k < 2:
            raise ValueError("buffer size k must be at least 2")
        self.k = k
        self._buf_lambda = <double*> malloc(k * sizeof(double))
        self._buf_mu = <double*> malloc(k * sizeof(double))
        self._buf_cpu = <double*> malloc(k * sizeof(double))
        self._buf_mem = <double*> malloc(k * sizeof(double))
        if (self._buf_lambda == NULL or self._buf_mu == NULL
                or self._buf_cpu == NULL or self._buf_mem == NULL):
            raise MemoryError()
        cdef int i
        for i in range(k):
            self._buf_lambda[i] = C_NAN
            self._buf_mu[i] = C_NAN
            self._buf_cpu[i] = C_NAN
            self._buf_mem[i] = C_NAN
        self.arrival_index = 0
        self.completion_index = 0
        self.arrival_count = 0
        self.completion_count = 0
        self.arrival_wraps = 0
        self.completion_wraps = 0
        self.interval_sum = 0.0
        self.last_arrival = C_NAN
        self.lambda_hat = 0.0
        self.lambda_prev = 0.0
        self.delta_lambda = 0.0
        self.lambda_eff = 0.0
        self.mu = 0.0
        self.cpu_avg = 0.0
        self.mem_avg = 0.0

    def __dealloc__(self):
        if self._buf_lambda != NULL:
            free(self._buf_lambda)
        if self._buf_mu != NULL:
            free(self._buf_mu)
        if self._buf_cpu != NULL:
            free(self._buf_cpu)
        if self._buf_mem != NULL:
            free(self._buf_mem)

    @property
    def buf_lambda(self):
        return [self._buf_lambda[i] for i in range(self.k)]

    @property
    def buf_mu(self):
        return [self._buf_mu[i] for i in range(self.k)]

    @property
    def buf_cpu(self):
        return [self._buf_cpu[i] for i in range(self.k)]

    @property
    def buf_mem(self):
        return [self._buf_mem[i] for i in range(self.k)]

    cpdef record_arrival(self, double timestamp):
        cdef int k = self.k
        cdef long count = self.arrival_count
        cdef int idx = self.arrival_index
        cdef double z, y
        cdef long valid
        cdef double d, s
        if count > 0:
            if timestamp < self.last_arrival:
                raise ValueError(
                    f"arrival timestamps must be non-decreasing "
                    f"({timestamp!r} after {self.last_arrival!r})"
                )
            z = timestamp - self.last_arrival
            if count >= k:
                y = self._buf_lambda[(idx + 1) % k] - self._buf_lambda[idx]
                self.interval_sum += z - y
            else:
                self.interval_sum += z
        self._buf_lambda[idx] = timestamp
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

        if idx == 0:
            self.arrival_wraps += 1
            if self.arrival_wraps == 1:
                self.lambda_prev = self.lambda_hat
            else:
                self.lambda_prev = ARMA_WEIGHT * (self.lambda_prev + self.lambda_hat)

    cpdef record_completion(self, double exec_time, double cpu_cost, double mem_cost):
        if exec_time <= 0.0 or isnan(exec_time):
            raise ValueError("execution time must be positive")
        if cpu_cost < 0.0 or mem_cost < 0.0:
            raise ValueError("resource costs must be non-negative")
        cdef int k = self.k
        cdef int idx = self.completion_index
        cdef double acc_mu, acc_cpu, acc_mem
        cdef int i
        self._buf_mu[idx] = exec_time
        self._buf_cpu[idx] = cpu_cost
        self._buf_mem[idx] = mem_cost
        self.completion_count += 1
        idx += 1
        if idx == k:
            idx = 0
        self.completion_index = idx
        if idx == 0:
            self.completion_wraps += 1
            acc_mu = 0.0
            acc_cpu = 0.0
            acc_mem = 0.0
            for i in range(k):
                acc_mu += self._buf_mu[i]
                acc_cpu += self._buf_cpu[i]
                acc_mem += self._buf_mem[i]
            self.mu = ARMA_WEIGHT * (self.mu + 1.0 / (acc_mu / k))
            self.cpu_avg = ARMA_WEIGHT * (self.cpu_avg + acc_cpu / k)
            self.mem_avg = ARMA_WEIGHT * (self.mem_avg + acc_mem / k)

    cpdef double mean_arrival_rate(self):
        cdef long valid = self.arrival_count
        if valid > self.k:
            valid = self.k
        if valid < 2:
            raise ValueError("need at least two arrivals to estimate a rate")
        cdef double s = self.interval_sum
        return (valid - 1) / s if s > 0.0 else INF

    cpdef bint is_warm(self):
        return self.arrival_count >= self.k and self.completion_wraps >= 1

    cpdef double execution_probability(self, double cpu_capacity, double mem_capacity):
        if not self.is_warm():
            return 1.0
        return admission_probability(
            self.lambda_eff, self.mu, self.cpu_avg, self.mem_avg,
            cpu_capacity, mem_capacity,
        )
