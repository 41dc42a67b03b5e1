"""Offload decision engine: is moving a cluster off the device worth it?

Validity is judged per class from its method profiles, weighted by each
method's share of the class's invocations. A cluster is offloadable only if
every member class passes both gates:

* time: local execution must cost strictly more than remote execution plus
  the transfer penalty paid by boundary methods (round trip and payload
  bytes over the link),
* energy: local execution must drain strictly more than transmitting the
  boundary payloads and idling while waiting for results.

``select_partition`` walks candidate partitions from coarse to fine and
returns the first one offering a valid cluster, falling back to single-class
offload and finally to keeping everything local.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .partition import PINNED_TAG, CallGraph, MethodProfile, PartitionSet


class DecisionError(ValueError):
    """Raised for invalid decision inputs."""


@dataclass(frozen=True)
class NetworkConditions:
    """Link quality between device and executor, plus relative cpu speed."""

    rtt_s: float
    bandwidth_bytes_per_s: float
    cpu_speedup: float

    def __post_init__(self):
        if self.rtt_s < 0.0:
            raise DecisionError("rtt must be non-negative")
        if self.bandwidth_bytes_per_s <= 0.0:
            raise DecisionError("bandwidth must be positive")
        if self.cpu_speedup <= 0.0:
            raise DecisionError("cpu speedup must be positive")


@dataclass(frozen=True)
class EnergyModel:
    """Device-side energy prices; zero fields mean free (or unmetered)."""

    energy_per_tx_byte_j: float = 0.0
    energy_per_rx_byte_j: float = 0.0
    energy_idle_per_s_j: float = 0.0

    def __post_init__(self):
        if (
            self.energy_per_tx_byte_j < 0.0
            or self.energy_per_rx_byte_j < 0.0
            or self.energy_idle_per_s_j < 0.0
        ):
            raise DecisionError("energy prices must be non-negative")


def load_energy_model(source) -> EnergyModel:
    """Energy model from a JSON object file (missing keys fall back to 0)."""
    if isinstance(source, dict):
        data = source
    else:
        try:
            data = json.loads(Path(source).read_text())
        except OSError as exc:
            raise DecisionError(f"cannot read energy model {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DecisionError(f"energy model is not valid JSON: {exc}") from exc
    try:
        return EnergyModel(
            energy_per_tx_byte_j=float(data.get("energy_per_tx_byte_j", 0.0)),
            energy_per_rx_byte_j=float(data.get("energy_per_rx_byte_j", 0.0)),
            energy_idle_per_s_j=float(data.get("energy_idle_per_s_j", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise DecisionError(f"malformed energy model: {exc}") from exc


@dataclass
class ClassProfile:
    """One class prepared for validity checks: methods plus which of them
    cross the cluster boundary (and therefore pay transfer costs)."""

    name: str
    methods: list[MethodProfile]
    boundary_flags: list[bool]

    def __post_init__(self):
        if len(self.methods) != len(self.boundary_flags):
            raise DecisionError(
                f"class {self.name!r}: one boundary flag per method required"
            )


def build_class_profile(graph: CallGraph, name: str, cluster: set[str]) -> ClassProfile:
    """Profile a class relative to a candidate cluster.

    The call graph is class granular, so boundary status is per class: any
    edge leaving the cluster marks every method of the class as boundary.
    """
    if name not in graph.vertices:
        raise DecisionError(f"unknown class {name!r}")
    node = graph.vertices[name]
    is_boundary = any(nb not in cluster for nb in graph.adj[name])
    return ClassProfile(
        name=name,
        methods=list(node.methods),
        boundary_flags=[is_boundary] * len(node.methods),
    )


def _frequencies(profile: ClassProfile) -> list[float]:
    total = sum(m.invocations for m in profile.methods)
    if total <= 0.0:
        return [0.0] * len(profile.methods)
    return [m.invocations / total for m in profile.methods]


def _offload_time(m: MethodProfile, cond: NetworkConditions) -> float:
    return m.t_local_s / (cond.cpu_speedup * m.cpu_scale_hint)


def _transfer_time(m: MethodProfile, cond: NetworkConditions) -> float:
    return cond.rtt_s + (m.in_bytes + m.out_bytes) / cond.bandwidth_bytes_per_s


def class_valid_time(profile: ClassProfile, cond: NetworkConditions) -> bool:
    """Strict time gate: offloading must beat local execution outright.

    Empty method lists never validate (nothing measurable to win on).
    """
    if not profile.methods:
        return False
    freqs = _frequencies(profile)
    local = 0.0
    remote = 0.0
    for f, m, boundary in zip(freqs, profile.methods, profile.boundary_flags):
        local += f * m.t_local_s
        remote += f * _offload_time(m, cond)
        if boundary:
            remote += f * _transfer_time(m, cond)
    return local > remote


def class_valid_energy(
    profile: ClassProfile, cond: NetworkConditions, model: EnergyModel
) -> bool:
    """Strict energy gate: offloading must drain the battery strictly less.

    Boundary methods pay to transmit inputs, receive outputs, and idle for
    the round trip plus remote execution. When neither side consumes any
    energy at all the gate passes vacuously (no energy signal to act on).
    """
    if not profile.methods:
        return False
    freqs = _frequencies(profile)
    local = 0.0
    remote = 0.0
    for f, m, boundary in zip(freqs, profile.methods, profile.boundary_flags):
        local += f * m.energy_local_j
        if boundary:
            wait = _transfer_time(m, cond) + _offload_time(m, cond)
            remote += f * (
                m.in_bytes * model.energy_per_tx_byte_j
                + m.out_bytes * model.energy_per_rx_byte_j
                + wait * model.energy_idle_per_s_j
            )
    if local == 0.0 and remote == 0.0:
        return True
    return local > remote


@dataclass
class LatencyWindow:
    """Sliding window over the last few RTT observations (capacity 3)."""

    capacity: int = 3
    samples: list[float] = field(default_factory=list)
    updated_at: float | None = None

    def rtt_estimate(self) -> float:
        if not self.samples:
            raise DecisionError("latency window holds no samples yet")
        return sum(self.samples) / len(self.samples)


def update_latency_window(window: LatencyWindow, rtt_s: float, now: float) -> LatencyWindow:
    """Record one RTT probe, evicting the oldest beyond the capacity."""
    if rtt_s < 0.0:
        raise DecisionError("rtt sample must be non-negative")
    window.samples.append(rtt_s)
    if len(window.samples) > window.capacity:
        del window.samples[: len(window.samples) - window.capacity]
    window.updated_at = now
    return window


@dataclass
class OffloadVerdict:
    """Outcome of partition selection."""

    local_only: bool
    chosen_n: int | None
    offload_classes: list[str]
    per_class_validity: dict[str, dict[str, bool]]
    source: str  # "partition", "singleton-fallback", or "local-only"

    def to_dict(self) -> dict:
        return {
            "local_only": self.local_only,
            "chosen_N": self.chosen_n,
            "offload_classes": self.offload_classes,
            "per_class_validity": self.per_class_validity,
            "source": self.source,
        }


def _evaluate_pset(
    graph: CallGraph,
    pset: PartitionSet,
    cond: NetworkConditions,
    model: EnergyModel,
) -> tuple[list[list[str]], int, dict[str, dict[str, bool]]]:
    surviving: list[list[str]] = []
    offloadable_count = 0
    validity: dict[str, dict[str, bool]] = {}
    for cluster, ok in zip(pset.clusters, pset.offloadable):
        if not ok:
            continue
        offloadable_count += 1
        members = set(cluster)
        cluster_ok = True
        for name in cluster:
            prof = build_class_profile(graph, name, members)
            tv = class_valid_time(prof, cond)
            ev = class_valid_energy(prof, cond, model)
            validity[name] = {"time": tv, "energy": ev}
            if not (tv and ev):
                cluster_ok = False
        if cluster_ok:
            surviving.append(cluster)
    return surviving, offloadable_count, validity


def select_partition(
    sets: list[PartitionSet],
    graph: CallGraph,
    cond: NetworkConditions,
    model: EnergyModel | None = None,
    mode: str = "any",
) -> OffloadVerdict:
    """Pick what to offload.

    Walks the candidate partitions in ascending cluster count and returns
    the first whose offloadable clusters pass the gates (``mode="any"``
    needs one passing cluster and offloads exactly the passing ones;
    ``mode="all"`` demands every offloadable cluster passes). If no
    partition qualifies, each unpinned class is tried alone (boundary
    status from its degree); if that fails too, everything stays local.
    """
    if mode not in ("any", "all"):
        raise DecisionError(f"unknown selection mode {mode!r}")
    model = model or EnergyModel()

    for pset in sorted(sets, key=lambda p: p.n_clusters):
        surviving, offloadable_count, validity = _evaluate_pset(graph, pset, cond, model)
        selected: list[list[str]] | None = None
        if mode == "any" and surviving:
            selected = surviving
        elif mode == "all" and offloadable_count and len(surviving) == offloadable_count:
            selected = surviving
        if selected is not None:
            classes = sorted(name for cluster in selected for name in cluster)
            return OffloadVerdict(
                local_only=False,
                chosen_n=pset.n_clusters,
                offload_classes=classes,
                per_class_validity=validity,
                source="partition",
            )

    validity = {}
    chosen: list[str] = []
    for name in sorted(graph.vertices):
        node = graph.vertices[name]
        if PINNED_TAG in node.tags:
            continue
        prof = build_class_profile(graph, name, {name})
        tv = class_valid_time(prof, cond)
        ev = class_valid_energy(prof, cond, model)
        validity[name] = {"time": tv, "energy": ev}
        if tv and ev:
            chosen.append(name)
    if chosen:
        return OffloadVerdict(
            local_only=False,
            chosen_n=None,
            offload_classes=chosen,
            per_class_validity=validity,
            source="singleton-fallback",
        )
    return OffloadVerdict(
        local_only=True,
        chosen_n=None,
        offload_classes=[],
        per_class_validity=validity,
        source="local-only",
    )


__all__ = [
    "ClassProfile",
    "DecisionError",
    "EnergyModel",
    "LatencyWindow",
    "NetworkConditions",
    "OffloadVerdict",
    "build_class_profile",
    "class_valid_energy",
    "class_valid_time",
    "load_energy_model",
    "select_partition",
    "update_latency_window",
]
