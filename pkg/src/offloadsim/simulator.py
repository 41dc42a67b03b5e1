"""Discrete-event simulator for in-network request offloading.

Each node is a single-server FIFO queue: admitted requests wait their turn
and hold the node for an exponentially distributed service time, so the
instantaneous normalized load is (sum of cpu costs of requests in system)
divided by cpu capacity. Strategies decide per arrival whether to execute,
drop, or forward (see ``control``).

Event ordering is a strict total order: time, then kind rank (gossip
deliveries before completions before arrivals before heartbeats before
samples), then node id, then a global sequence number. Simultaneous events
therefore replay identically for a given seed, and a scenario config plus
seed fully determines every metric byte.

Metrics (collected over [warmup, horizon), then settled so every admitted
request finishes):

* tau: mean normalized load across executor nodes, from exact
  time-weighted integrals (independent of the sampling cadence),
* phi: mean end-to-end latency in ms of executed requests, counting twice
  the traversed link delay (request out, response back) plus queueing and
  execution at the serving node,
* psi: fraction of requests dropped.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
from collections import deque
from dataclasses import dataclass, field, replace
from heapq import heapify, heappop, heappush
from pathlib import Path

from .control import Action, NeighborLoadTable, decide_none, decide_passive, decide_proactive
from .topology import NodeSpec, Topology, generate_topology, load_topology
from .workload import JitterSpec, ServiceSpec, _iter_arrival_tuples, new_estimator

STRATEGIES = ("none", "passive", "proactive")

# Event kind ranks; lower processes first at equal timestamps.
_GOSSIP = 0
_COMPLETION = 1
_ARRIVAL = 2
_HEARTBEAT = 3
_SAMPLE = 4
_JITTER_MARK = 5


class ConfigError(ValueError):
    """Raised for invalid scenario configurations."""


@dataclass
class ScenarioConfig:
    """Fully resolved description of one simulation run."""

    topology: Topology
    services: list[ServiceSpec]
    base_rate_per_s: float
    horizon_s: float
    strategy: str = "none"
    load_multiplier: float = 1.0
    jitters: list[JitterSpec] = field(default_factory=list)
    buffer_size: int = 128
    ttl: int | None = None
    gossip_period_ms: float = 1.0
    capacity_threshold: float = 1.0
    warmup_s: float | None = None
    seed: int | str = 0
    sample_interval_ms: float = 1.0
    server_executes: bool = False
    proactive_forwarding: bool = True
    name: str = "custom"

    def resolved_warmup(self) -> float:
        return 0.1 * self.horizon_s if self.warmup_s is None else self.warmup_s

    def resolved_ttl(self) -> int:
        return 2 * self.topology.hop_diameter() if self.ttl is None else self.ttl

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r} (choose from {STRATEGIES})")
        if not self.services:
            raise ConfigError("at least one service must be defined")
        if self.base_rate_per_s <= 0.0:
            raise ConfigError("base_rate_per_s must be positive")
        if self.load_multiplier <= 0.0:
            raise ConfigError("load_multiplier must be positive")
        if self.horizon_s <= 0.0:
            raise ConfigError("horizon_s must be positive")
        w = self.resolved_warmup()
        if not 0.0 <= w < self.horizon_s:
            raise ConfigError("warmup must lie inside [0, horizon)")
        if self.buffer_size < 2:
            raise ConfigError("estimator buffer_size must be at least 2")
        if self.ttl is not None and self.ttl < 0:
            raise ConfigError("ttl must be non-negative")
        if self.gossip_period_ms <= 0.0:
            raise ConfigError("gossip_period_ms must be positive")
        if self.capacity_threshold <= 0.0:
            raise ConfigError("capacity_threshold must be positive")
        if self.sample_interval_ms < 0.0:
            raise ConfigError("sample_interval_ms must be non-negative")
        ordered = sorted(self.jitters, key=lambda j: j.start_ms)
        for a, b in zip(ordered, ordered[1:]):
            if b.start_ms < a.end_ms:
                raise ConfigError(
                    f"jitter windows overlap: [{a.start_ms}, {a.end_ms}) and "
                    f"[{b.start_ms}, {b.end_ms}) ms"
                )
        if not self.topology.access_points():
            raise ConfigError("topology declares no access points, nothing can arrive")


def scenario_from_dict(data: dict, base_dir: Path | None = None) -> ScenarioConfig:
    """Build a config from parsed JSON (see docs/schemas/scenario.json)."""
    if not isinstance(data, dict):
        raise ConfigError("scenario config must be a JSON object")
    try:
        topo_spec = data["topology"]
        if "file" in topo_spec:
            path = Path(topo_spec["file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            topo = load_topology(path)
        elif "generate" in topo_spec:
            gen = dict(topo_spec["generate"])
            kind = gen.pop("kind")
            gen_seed = gen.pop("seed", 0)
            topo = generate_topology(kind, gen, seed=gen_seed)
        else:
            raise ConfigError("topology must specify 'file' or 'generate'")
        services = [
            ServiceSpec(
                name=s.get("id", f"svc{i}"),
                mean_exec_time_s=float(s["mean_exec_time_s"]),
                cpu_cost=float(s.get("cpu_cost", 1.0)),
                mem_cost=float(s.get("mem_cost", 0.0)),
                popularity_weight=float(s.get("popularity_weight", 1.0)),
            )
            for i, s in enumerate(data["services"])
        ]
        jitters = [
            JitterSpec(
                start_ms=float(j["start_ms"]),
                duration_ms=float(j["duration_ms"]),
                rate_multiplier=float(j["rate_multiplier"]),
            )
            for j in data.get("jitters", [])
        ]
        cfg = ScenarioConfig(
            topology=topo,
            services=services,
            base_rate_per_s=float(data["base_rate_per_s"]),
            horizon_s=float(data["horizon_s"]),
            strategy=data.get("strategy", "none"),
            load_multiplier=float(data.get("load_multiplier", 1.0)),
            jitters=jitters,
            buffer_size=int(data.get("buffer_size", 128)),
            ttl=int(data["ttl"]) if "ttl" in data and data["ttl"] is not None else None,
            gossip_period_ms=float(data.get("gossip_period_ms", 1.0)),
            capacity_threshold=float(data.get("capacity_threshold", 1.0)),
            warmup_s=float(data["warmup_s"]) if data.get("warmup_s") is not None else None,
            seed=data.get("seed", 0),
            sample_interval_ms=float(data.get("sample_interval_ms", 1.0)),
            server_executes=bool(data.get("server_executes", False)),
            proactive_forwarding=bool(data.get("proactive_forwarding", True)),
            name=data.get("name", "custom"),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario config: {exc}") from exc
    cfg.validate()
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario config {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data, base_dir=path.parent)


@dataclass
class RunMetrics:
    """Everything measured by one run (counts are post-warmup unless gross)."""

    strategy: str
    seed: int | str
    tau: float
    phi_ms: float
    psi: float
    total_arrivals: int
    executed: int
    forwarded: int
    dropped: int
    per_node_mean_load: dict[int, float]
    per_node_executed: dict[int, int]
    gross_arrivals: int
    gross_executed: int
    gross_dropped: int
    sample_node_ids: list[int]
    sample_times_ms: list[float]
    sample_loads: list[list[float]]


def run_scenario(cfg: ScenarioConfig) -> RunMetrics:
    """Execute one scenario to settlement and return its metrics."""
    cfg.validate()
    topo = cfg.topology
    strategy = cfg.strategy
    horizon = cfg.horizon_s
    warmup = cfg.resolved_warmup()
    ttl0 = cfg.resolved_ttl()
    server_executes = cfg.server_executes
    fwd_enabled = cfg.proactive_forwarding
    threshold = cfg.capacity_threshold

    ids = sorted(topo.nodes)
    idx_of = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    server = idx_of[topo.server_id]
    is_relay = [topo.nodes[nid].is_relay for nid in ids]
    cpu_cap = [topo.nodes[nid].cpu_capacity for nid in ids]
    mem_cap = [topo.nodes[nid].mem_capacity for nid in ids]
    inv_cap = [1.0 / c for c in cpu_cap]
    thr_abs = [threshold * c for c in cpu_cap]
    # Executors run a strategy and may execute; the sink server and relays do not.
    executor = [
        not is_relay[i] and (i != server or server_executes) for i in range(n)
    ]
    next_hop = [-1] * n
    delay_to_next = [0.0] * n
    for i, nid in enumerate(ids):
        nh = topo.next_hop_toward_server(nid)
        if nh is not None:
            next_hop[i] = idx_of[nh]
            delay_to_next[i] = topo.adj[nid][nh] / 1000.0

    svc_rate = [1.0 / s.mean_exec_time_s for s in cfg.services]
    svc_cpu = [s.cpu_cost for s in cfg.services]
    svc_mem = [s.mem_cost for s in cfg.services]

    aps = sorted(idx_of[a] for a in topo.access_points())

    proactive = strategy == "proactive"
    estimators = [None] * n
    tables: list[NeighborLoadTable | None] = [None] * n
    pub_groups: list[list[tuple[float, tuple[int, ...]]]] = [[] for _ in range(n)]
    hb_groups: list[tuple[float, list[tuple[int, int]]]] = []
    if proactive:
        for i, nid in enumerate(ids):
            if not executor[i]:
                continue
            estimators[i] = new_estimator(cfg.buffer_size)
            exec_nbrs = [
                idx_of[m] for m in topo.adj[nid] if executor[idx_of[m]]
            ]
            tables[i] = NeighborLoadTable.seeded(exec_nbrs)
        by_delay: dict[float, list[tuple[int, int]]] = {}
        for i, nid in enumerate(ids):
            if not executor[i]:
                continue
            groups: dict[float, list[int]] = {}
            for m, d_ms in topo.adj[nid].items():
                j = idx_of[m]
                if executor[j] and tables[j] is not None:
                    groups.setdefault(d_ms / 1000.0, []).append(j)
                    by_delay.setdefault(d_ms / 1000.0, []).append((j, i))
            pub_groups[i] = [(d, tuple(sorted(rs))) for d, rs in sorted(groups.items())]
        hb_groups = [(d, sorted(pairs)) for d, pairs in sorted(by_delay.items())]

    rng = random.Random(f"{cfg.seed}|sim")
    rng_random = rng.random
    rng_expo = rng.expovariate

    arrivals = _iter_arrival_tuples(
        cfg.base_rate_per_s * cfg.load_multiplier,
        horizon,
        cfg.seed,
        cfg.jitters,
        cfg.services,
        aps,
    )

    queue = [deque() for _ in range(n)]
    busy = [False] * n
    load_num = [0.0] * n
    acc = [0.0] * n
    last_t = [0.0] * n

    counted_total = 0
    counted_exec = 0
    counted_fwd = 0
    counted_drop = 0
    gross_arrivals = 0
    gross_executed = 0
    gross_dropped = 0
    lat_sum = 0.0
    pne = [0] * n

    sample_dt = cfg.sample_interval_ms / 1000.0
    sample_times: list[float] = []
    sample_rows: list[list[float]] = []

    heap: list[tuple] = []
    seq = 0

    nxt = next(arrivals, None)
    if nxt is not None:
        heap.append((nxt[0], _ARRIVAL, nxt[2], seq, None, True))
        seq += 1
    if proactive and hb_groups and cfg.gossip_period_ms > 0:
        hb_dt = cfg.gossip_period_ms / 1000.0
        if hb_dt < horizon:
            heap.append((hb_dt, _HEARTBEAT, -1, seq))
            seq += 1
    if sample_dt > 0.0:
        heap.append((0.0, _SAMPLE, -1, seq))
        seq += 1
    for j in cfg.jitters:
        for edge_ms in (j.start_ms, j.end_ms):
            t_edge = edge_ms / 1000.0
            if t_edge <= horizon:
                heap.append((t_edge, _JITTER_MARK, -1, seq))
                seq += 1
    heapify(heap)

    # Request payload layout: [service, origin, t_origin, ttl, acc_delay_s,
    # counted, t_admitted]. Mutated in place across hops.

    def start_service(i: int, req: list, now: float) -> None:
        nonlocal seq
        dur = rng_expo(svc_rate[req[0]])
        heappush(heap, (now + dur, _COMPLETION, i, seq, req, dur))
        seq += 1

    while heap:
        ev = heappop(heap)
        t = ev[0]
        kind = ev[1]

        if kind == _ARRIVAL:
            i = ev[2]
            req = ev[4]
            if req is None:
                # External origination; schedule the next one right away.
                req = [nxt[1], i, t, ttl0, 0.0, t >= warmup, 0.0]
                gross_arrivals += 1
                if req[5]:
                    counted_total += 1
                nxt = next(arrivals, None)
                if nxt is not None:
                    heappush(heap, (nxt[0], _ARRIVAL, nxt[2], seq, None, True))
                    seq += 1

            if is_relay[i]:
                # Ingress plumbing: push toward the server, TTL untouched.
                j = next_hop[i]
                req[4] += delay_to_next[i]
                if req[5]:
                    counted_fwd += 1
                heappush(heap, (t + delay_to_next[i], _ARRIVAL, j, seq, req, False))
                seq += 1
                continue
            if not executor[i]:
                # Pure sink: the server absorbs nothing unless configured to.
                gross_dropped += 1
                if req[5]:
                    counted_drop += 1
                continue

            if strategy == "none":
                dec = decide_none(load_num[i] * inv_cap[i], threshold)
            elif strategy == "passive":
                dec = decide_passive(
                    load_num[i] * inv_cap[i], threshold, ids[i], topo, server_executes
                )
            else:
                est = estimators[i]
                est.record_arrival(t)
                dec = decide_proactive(
                    est,
                    tables[i],
                    cpu_cap[i],
                    mem_cap[i],
                    rng_random(),
                    req[3],
                    load_num[i] * inv_cap[i],
                    threshold,
                    fwd_enabled,
                )

            act = dec.action
            if act is Action.EXECUTE:
                lt = last_t[i]
                if lt < horizon:
                    hi = t if t < horizon else horizon
                    lo = lt if lt > warmup else warmup
                    if hi > lo:
                        acc[i] += load_num[i] * inv_cap[i] * (hi - lo)
                last_t[i] = t
                load_num[i] += svc_cpu[req[0]]
                req[6] = t
                if busy[i]:
                    queue[i].append(req)
                else:
                    busy[i] = True
                    start_service(i, req, t)
            elif act is Action.DROP:
                gross_dropped += 1
                if req[5]:
                    counted_drop += 1
            else:
                # Neighbor-table targets are dense indices; passive targets
                # come back as topology-level node ids.
                if strategy == "proactive":
                    j = dec.target
                    req[3] -= 1
                    d = topo.adj[ids[i]][ids[j]] / 1000.0
                else:
                    j = idx_of[dec.target]
                    d = delay_to_next[i]
                req[4] += d
                if req[5]:
                    counted_fwd += 1
                heappush(heap, (t + d, _ARRIVAL, j, seq, req, False))
                seq += 1

        elif kind == _COMPLETION:
            i = ev[2]
            req = ev[4]
            dur = ev[5]
            lt = last_t[i]
            if lt < horizon:
                hi = t if t < horizon else horizon
                lo = lt if lt > warmup else warmup
                if hi > lo:
                    acc[i] += load_num[i] * inv_cap[i] * (hi - lo)
            last_t[i] = t
            load_num[i] -= svc_cpu[req[0]]
            gross_executed += 1
            if req[5]:
                counted_exec += 1
                pne[i] += 1
                lat_sum += (t - req[6]) + 2.0 * req[4]
            if proactive and estimators[i] is not None:
                estimators[i].record_completion(dur, svc_cpu[req[0]], svc_mem[req[0]])
                if pub_groups[i]:
                    lv = load_num[i] * inv_cap[i]
                    for d, receivers in pub_groups[i]:
                        heappush(heap, (t + d, _GOSSIP, i, seq, receivers, lv, t))
                        seq += 1
            if queue[i]:
                start_service(i, queue[i].popleft(), t)
            else:
                busy[i] = False

        elif kind == _GOSSIP:
            sender = ev[2]
            if sender >= 0:
                receivers, lv, t_pub = ev[4], ev[5], ev[6]
                for r in receivers:
                    tbl = tables[r]
                    if t_pub >= tbl.as_of[sender]:
                        tbl.loads[sender] = lv
                        tbl.as_of[sender] = t_pub
            else:
                pairs, snap, t_pub = ev[4], ev[5], ev[6]
                for r, s in pairs:
                    tbl = tables[r]
                    if t_pub >= tbl.as_of[s]:
                        tbl.loads[s] = snap[s]
                        tbl.as_of[s] = t_pub

        elif kind == _HEARTBEAT:
            snap = [load_num[i] * inv_cap[i] for i in range(n)]
            for d, pairs in hb_groups:
                heappush(heap, (t + d, _GOSSIP, -1, seq, pairs, snap, t))
                seq += 1
            t_next = t + hb_dt
            if t_next < horizon:
                heappush(heap, (t_next, _HEARTBEAT, -1, seq))
                seq += 1

        elif kind == _SAMPLE:
            sample_times.append(t * 1000.0)
            sample_rows.append([load_num[i] * inv_cap[i] for i in range(n)])
            t_next = t + sample_dt
            if t_next <= horizon + 1e-12:
                heappush(heap, (t_next, _SAMPLE, -1, seq))
                seq += 1

        # _JITTER_MARK events only annotate the trace; nothing to do.

    if gross_executed + gross_dropped != gross_arrivals:
        raise RuntimeError(
            f"conservation violated: {gross_executed} executed + "
            f"{gross_dropped} dropped != {gross_arrivals} arrivals"
        )
    if counted_exec + counted_drop != counted_total:
        raise RuntimeError("conservation violated in the measurement window")

    span = horizon - warmup
    for i in range(n):
        lt = last_t[i]
        if lt < horizon:
            lo = lt if lt > warmup else warmup
            if horizon > lo:
                acc[i] += load_num[i] * inv_cap[i] * (horizon - lo)
            last_t[i] = horizon

    exec_nodes = [i for i in range(n) if executor[i]]
    tau = (
        sum(acc[i] for i in exec_nodes) / (len(exec_nodes) * span) if exec_nodes else 0.0
    )
    phi_ms = (lat_sum / counted_exec) * 1000.0 if counted_exec else 0.0
    psi = counted_drop / counted_total if counted_total else 0.0

    return RunMetrics(
        strategy=strategy,
        seed=cfg.seed,
        tau=tau,
        phi_ms=phi_ms,
        psi=psi,
        total_arrivals=counted_total,
        executed=counted_exec,
        forwarded=counted_fwd,
        dropped=counted_drop,
        per_node_mean_load={ids[i]: acc[i] / span for i in range(n)},
        per_node_executed={ids[i]: pne[i] for i in range(n)},
        gross_arrivals=gross_arrivals,
        gross_executed=gross_executed,
        gross_dropped=gross_dropped,
        sample_node_ids=list(ids),
        sample_times_ms=sample_times,
        sample_loads=sample_rows,
    )


def run_batch(cfg: ScenarioConfig, seeds) -> list[RunMetrics]:
    """One run per seed, identical configuration otherwise."""
    return [run_scenario(replace(cfg, seed=s)) for s in seeds]


def aggregate_metrics(runs: list[RunMetrics]) -> dict:
    """Mean and sample standard deviation of the headline metrics."""
    if not runs:
        raise ValueError("no runs to aggregate")

    def stats(values: list[float]) -> dict:
        return {
            "mean": statistics.fmean(values),
            "std": statistics.stdev(values) if len(values) > 1 else 0.0,
        }

    return {
        "runs": len(runs),
        "tau": stats([r.tau for r in runs]),
        "phi_ms": stats([r.phi_ms for r in runs]),
        "psi": stats([r.psi for r in runs]),
    }


def _summary_dict(m: RunMetrics) -> dict:
    return {
        "strategy": m.strategy,
        "seed": m.seed,
        "tau": m.tau,
        "phi_ms": m.phi_ms,
        "psi": m.psi,
        "total_arrivals": m.total_arrivals,
        "executed": m.executed,
        "forwarded": m.forwarded,
        "dropped": m.dropped,
        "gross_arrivals": m.gross_arrivals,
        "gross_executed": m.gross_executed,
        "gross_dropped": m.gross_dropped,
        "per_node_mean_load": {str(k): v for k, v in m.per_node_mean_load.items()},
        "per_node_executed": {str(k): v for k, v in m.per_node_executed.items()},
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def export_metrics(metrics: RunMetrics, fmt: str, dest_dir, prefix: str = "run") -> list[Path]:
    """Write <prefix>_summary and <prefix>_series files; returns the paths.

    Output is byte-stable: repeated exports of the same run match exactly.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown export format {fmt!r} (use 'csv' or 'json')")
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    summary_path = dest / f"{prefix}_summary.{fmt}"
    series_path = dest / f"{prefix}_series.{fmt}"

    if fmt == "json":
        summary_path.write_text(_dump_json(_summary_dict(metrics)))
        series = {
            "node_ids": metrics.sample_node_ids,
            "samples": [
                {"time_ms": t, "loads": row}
                for t, row in zip(metrics.sample_times_ms, metrics.sample_loads)
            ],
        }
        series_path.write_text(_dump_json(series))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = [
            "strategy", "seed", "tau", "phi_ms", "psi", "total_arrivals",
            "executed", "forwarded", "dropped", "gross_arrivals",
            "gross_executed", "gross_dropped",
        ]
        summary = _summary_dict(metrics)
        w.writerow(keys)
        w.writerow([repr(summary[k]) if isinstance(summary[k], float) else summary[k] for k in keys])
        summary_path.write_text(buf.getvalue())

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_ms", "node_id", "normalized_load"])
        for t, row in zip(metrics.sample_times_ms, metrics.sample_loads):
            for nid, load in zip(metrics.sample_node_ids, row):
                w.writerow([repr(t), nid, repr(load)])
        series_path.write_text(buf.getvalue())
    return [summary_path, series_path]


def export_batch(runs: list[RunMetrics], dest_dir, prefix: str = "batch") -> Path:
    """Aggregate summary for a seed sweep (JSON only)."""
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    payload = {
        "aggregate": aggregate_metrics(runs),
        "per_seed": [_summary_dict(r) for r in runs],
    }
    out = dest / f"{prefix}_summary.json"
    out.write_text(_dump_json(payload))
    return out


def preset_fig3(strategy: str = "proactive") -> ScenarioConfig:
    """Jitter-response scenario: a client chain with two identical rate
    surges, sized so the first surge hits cold estimators and the second
    one hits warm ones."""
    nodes = [
        NodeSpec(id=0, cpu_capacity=5.0, mem_capacity=4.0, is_access_point=True, is_relay=True),
        NodeSpec(id=1, cpu_capacity=5.0, mem_capacity=4.0),
        NodeSpec(id=2, cpu_capacity=5.0, mem_capacity=4.0),
        NodeSpec(id=3, cpu_capacity=8.0, mem_capacity=8.0),
    ]
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    topo = Topology(nodes, edges, server_id=3)
    return ScenarioConfig(
        name="fig3",
        topology=topo,
        services=[ServiceSpec(name="render", mean_exec_time_s=0.00075, cpu_cost=1.0)],
        base_rate_per_s=1000.0,
        horizon_s=0.150,
        strategy=strategy,
        jitters=[
            JitterSpec(start_ms=40.0, duration_ms=10.0, rate_multiplier=6.0),
            JitterSpec(start_ms=70.0, duration_ms=10.0, rate_multiplier=6.0),
        ],
        buffer_size=64,
        ttl=6,
        gossip_period_ms=1.0,
        capacity_threshold=1.0,
        warmup_s=0.0,
        seed=0,
        sample_interval_ms=1.0,
    )


def preset_overload_line(strategy: str = "proactive") -> ScenarioConfig:
    """Sustained overload on a four-node chain (access point feeds toward
    the sink server); offered load sits just under the proactive capacity."""
    topo = generate_topology("line", {"n": 4, "cpu": 3.0, "mem": 4.0})
    return ScenarioConfig(
        name="overload-line",
        topology=topo,
        services=[ServiceSpec(name="task", mean_exec_time_s=0.00026, cpu_cost=1.0)],
        base_rate_per_s=1000.0,
        load_multiplier=8.0,
        horizon_s=2.5,
        warmup_s=0.5,
        strategy=strategy,
        buffer_size=128,
        ttl=10,
        gossip_period_ms=1.0,
        capacity_threshold=1.0,
        seed=0,
        sample_interval_ms=0.0,
    )


def preset_overload_grid(strategy: str = "proactive") -> ScenarioConfig:
    """Sustained overload on a 5x5 lattice; arrivals enter at the perimeter
    and the corner server only routes."""
    topo = generate_topology("grid", {"width": 5, "height": 5, "cpu": 3.0, "mem": 4.0})
    return ScenarioConfig(
        name="overload-grid",
        topology=topo,
        services=[ServiceSpec(name="task", mean_exec_time_s=0.002, cpu_cost=1.0)],
        base_rate_per_s=1000.0,
        load_multiplier=8.0,
        horizon_s=2.5,
        warmup_s=0.5,
        strategy=strategy,
        buffer_size=128,
        ttl=16,
        gossip_period_ms=1.0,
        capacity_threshold=1.0,
        seed=0,
        sample_interval_ms=0.0,
    )


PRESETS = {
    "fig3": preset_fig3,
    "overload-line": preset_overload_line,
    "overload-grid": preset_overload_grid,
}


__all__ = [
    "PRESETS",
    "STRATEGIES",
    "ConfigError",
    "RunMetrics",
    "ScenarioConfig",
    "aggregate_metrics",
    "export_batch",
    "export_metrics",
    "load_scenario",
    "preset_fig3",
    "preset_overload_grid",
    "preset_overload_line",
    "run_batch",
    "run_scenario",
    "scenario_from_dict",
]
