"""Network topology: nodes, links, and shortest-path routing to the server.

Topologies come from an edge-list text format or from seeded generators
(line, grid, tree, scale_free). Every topology has exactly one server node;
routing toward it uses link-delay shortest paths (ties resolved toward the
lowest node id so routes are reproducible).

Node roles:

* executor: runs the admission strategy and can execute requests,
* access point: executor where external requests may originate,
* relay access point / relay: never executes, forwards everything toward
  the server (models client devices and plain routers),
* server: the path sink; executes only when the scenario says so.

File format (delays in milliseconds, '#' starts a comment)::

    nodes 4 server 3
    0 2.0 1.0 2
    1 2.0 1.0 0
    2 2.0 1.0 0
    3 8.0 8.0 0
    0 1 1.0
    1 2 1.0
    2 3 1.0

Node lines are ``id cpu mem access_flag`` with flags 0 executor,
1 executor access point, 2 relay access point, 3 relay.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

FLAG_EXECUTOR = 0
FLAG_ACCESS_POINT = 1
FLAG_RELAY_ACCESS_POINT = 2
FLAG_RELAY = 3


class TopologyError(ValueError):
    """Raised for malformed or inconsistent topology descriptions."""


@dataclass(frozen=True)
class NodeSpec:
    """Static per-node attributes."""

    id: int
    cpu_capacity: float
    mem_capacity: float
    is_access_point: bool = False
    is_relay: bool = False

    def __post_init__(self):
        if self.cpu_capacity <= 0.0 or self.mem_capacity <= 0.0:
            raise TopologyError(f"node {self.id}: capacities must be positive")


class Topology:
    """Immutable-by-convention network graph with precomputed routing."""

    def __init__(self, nodes: list[NodeSpec], edges: list[tuple[int, int, float]], server_id: int):
        self.nodes: dict[int, NodeSpec] = {}
        for spec in sorted(nodes, key=lambda n: n.id):
            if spec.id in self.nodes:
                raise TopologyError(f"duplicate node id {spec.id}")
            self.nodes[spec.id] = spec
        if not self.nodes:
            raise TopologyError("topology has no nodes")
        if server_id not in self.nodes:
            raise TopologyError(f"server id {server_id} is not a declared node")
        if self.nodes[server_id].is_relay:
            raise TopologyError(f"server node {server_id} cannot be a relay")
        self.server_id = server_id

        self.adj: dict[int, dict[int, float]] = {nid: {} for nid in self.nodes}
        for u, v, delay in edges:
            if u not in self.nodes or v not in self.nodes:
                missing = u if u not in self.nodes else v
                raise TopologyError(f"edge ({u}, {v}) references unknown node {missing}")
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            if delay < 0.0:
                raise TopologyError(f"edge ({u}, {v}) has negative delay {delay}")
            if v in self.adj[u]:
                raise TopologyError(f"duplicate edge ({u}, {v})")
            self.adj[u][v] = delay
            self.adj[v][u] = delay
        for nid in self.adj:
            self.adj[nid] = dict(sorted(self.adj[nid].items()))

        self.distance_to_server: dict[int, float] = {}
        self._next_hop: dict[int, int | None] = {}
        self._route()

    def _route(self) -> None:
        dist = {nid: float("inf") for nid in self.nodes}
        dist[self.server_id] = 0.0
        heap = [(0.0, self.server_id)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in self.adj[u].items():
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        unreachable = sorted(n for n, d in dist.items() if d == float("inf"))
        if unreachable:
            raise TopologyError(
                f"node(s) {unreachable} cannot reach the server {self.server_id}"
            )
        self.distance_to_server = dist
        for nid in self.nodes:
            if nid == self.server_id:
                self._next_hop[nid] = None
                continue
            best: tuple[float, int] | None = None
            for nb, w in self.adj[nid].items():
                cand = (w + dist[nb], nb)
                if best is None or cand < best:
                    best = cand
            self._next_hop[nid] = best[1] if best else None

    def next_hop_toward_server(self, node_id: int) -> int | None:
        """Neighbor on a delay-shortest path to the server; None at the server."""
        if node_id not in self.nodes:
            raise TopologyError(f"unknown node {node_id}")
        return self._next_hop[node_id]

    def neighbors(self, node_id: int) -> dict[int, float]:
        if node_id not in self.nodes:
            raise TopologyError(f"unknown node {node_id}")
        return self.adj[node_id]

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for u in self.adj:
            for v, w in self.adj[u].items():
                if u < v:
                    out.append((u, v, w))
        return out

    def access_points(self) -> list[int]:
        return [nid for nid, n in self.nodes.items() if n.is_access_point]

    def executor_ids(self) -> list[int]:
        """Nodes that run an admission strategy (relays and the sink excluded;
        the server is included because scenarios may let it execute)."""
        return [nid for nid, n in self.nodes.items() if not n.is_relay]

    def hop_diameter(self) -> int:
        """Longest shortest path in hops (unit edge weights)."""
        best = 0
        for src in self.nodes:
            depth = {src: 0}
            frontier = [src]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self.adj[u]:
                        if v not in depth:
                            depth[v] = depth[u] + 1
                            nxt.append(v)
                frontier = nxt
            best = max(best, max(depth.values()))
        return best

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Topology)
            and self.nodes == other.nodes
            and self.adj == other.adj
            and self.server_id == other.server_id
        )


def _node_flag(spec: NodeSpec) -> int:
    if spec.is_relay:
        return FLAG_RELAY_ACCESS_POINT if spec.is_access_point else FLAG_RELAY
    return FLAG_ACCESS_POINT if spec.is_access_point else FLAG_EXECUTOR


def _spec_from_flag(nid: int, cpu: float, mem: float, flag: int, line_no: int) -> NodeSpec:
    if flag not in (FLAG_EXECUTOR, FLAG_ACCESS_POINT, FLAG_RELAY_ACCESS_POINT, FLAG_RELAY):
        raise TopologyError(f"line {line_no}: unknown access flag {flag}")
    return NodeSpec(
        id=nid,
        cpu_capacity=cpu,
        mem_capacity=mem,
        is_access_point=flag in (FLAG_ACCESS_POINT, FLAG_RELAY_ACCESS_POINT),
        is_relay=flag in (FLAG_RELAY_ACCESS_POINT, FLAG_RELAY),
    )


def load_topology(source) -> Topology:
    """Parse the edge-list format from a path or a string of its contents.

    Raises TopologyError naming the offending line for malformed input.
    """
    if hasattr(source, "read_text"):
        text = source.read_text()
    else:
        text = str(source)
        if "\n" not in text and not text.strip().startswith("nodes"):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()

    lines: list[tuple[int, str]] = []
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((i, stripped))
    if not lines:
        raise TopologyError("no nodes: empty topology description")

    head_no, head = lines[0]
    parts = head.split()
    if len(parts) != 4 or parts[0] != "nodes" or parts[2] != "server":
        raise TopologyError(f"line {head_no}: expected header 'nodes N server S', got {head!r}")
    try:
        n_nodes = int(parts[1])
        server_id = int(parts[3])
    except ValueError:
        raise TopologyError(f"line {head_no}: header counts must be integers") from None
    if n_nodes <= 0:
        raise TopologyError(f"line {head_no}: node count must be positive")
    if len(lines) - 1 < n_nodes:
        raise TopologyError(f"expected {n_nodes} node lines, found {len(lines) - 1}")

    nodes: list[NodeSpec] = []
    for line_no, body in lines[1 : 1 + n_nodes]:
        fields = body.split()
        if len(fields) != 4:
            raise TopologyError(
                f"line {line_no}: expected 'id cpu mem access_flag', got {body!r}"
            )
        try:
            nid = int(fields[0])
            cpu = float(fields[1])
            mem = float(fields[2])
            flag = int(fields[3])
        except ValueError:
            raise TopologyError(f"line {line_no}: malformed node fields in {body!r}") from None
        if cpu <= 0.0 or mem <= 0.0:
            raise TopologyError(f"line {line_no}: node {nid} capacities must be positive")
        nodes.append(_spec_from_flag(nid, cpu, mem, flag, line_no))

    edges: list[tuple[int, int, float]] = []
    for line_no, body in lines[1 + n_nodes :]:
        fields = body.split()
        if len(fields) != 3:
            raise TopologyError(f"line {line_no}: expected 'u v delay_ms', got {body!r}")
        try:
            u = int(fields[0])
            v = int(fields[1])
            delay = float(fields[2])
        except ValueError:
            raise TopologyError(f"line {line_no}: malformed edge fields in {body!r}") from None
        if u == v:
            raise TopologyError(f"self-loop at line {line_no} (node {u})")
        if delay < 0.0:
            raise TopologyError(f"line {line_no}: negative delay on edge ({u}, {v})")
        edges.append((u, v, delay))

    return Topology(nodes, edges, server_id)


def write_topology(topo: Topology, path) -> None:
    """Serialize in the edge-list format (round-trips through load_topology)."""
    out = [f"nodes {len(topo.nodes)} server {topo.server_id}"]
    for nid, spec in topo.nodes.items():
        out.append(
            f"{nid} {spec.cpu_capacity!r} {spec.mem_capacity!r} {_node_flag(spec)}"
        )
    for u, v, w in topo.edges():
        out.append(f"{u} {v} {w!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def _uniform_specs(params: dict) -> tuple[float, float, float]:
    cpu = float(params.get("cpu", 1.0))
    mem = float(params.get("mem", 1.0))
    delay = float(params.get("delay_ms", 1.0))
    if cpu <= 0.0 or mem <= 0.0:
        raise TopologyError("generator capacities must be positive")
    if delay < 0.0:
        raise TopologyError("generator delay must be non-negative")
    return cpu, mem, delay


def _finalize(
    ids: list[int],
    edges: list[tuple[int, int, float]],
    server: int,
    aps: set[int],
    cpu: float,
    mem: float,
) -> Topology:
    nodes = [
        NodeSpec(id=i, cpu_capacity=cpu, mem_capacity=mem, is_access_point=i in aps)
        for i in ids
    ]
    return Topology(nodes, edges, server)


def generate_topology(kind: str, params: dict | None = None, seed=0) -> Topology:
    """Deterministic topology families.

    * ``line``: n nodes in a chain; server at one end, access point at the
      other (a single node is both).
    * ``grid``: width x height lattice; server at corner (0, 0), access
      points on the remaining perimeter.
    * ``tree``: complete b-ary tree of given depth, breadth-first ids;
      server is the highest-id leaf, other leaves are access points.
    * ``scale_free``: preferential-attachment graph; server is the highest
      degree node, access points default to the degree-one nodes (or the
      minimum-degree nodes when none exist). ``access_points`` in params
      caps how many are drawn (seeded sample).
    """
    params = dict(params or {})
    cpu, mem, delay = _uniform_specs(params)

    if kind == "line":
        n = int(params.get("n", 0))
        if n < 1:
            raise TopologyError("line topology needs n >= 1")
        ids = list(range(n))
        edges = [(i, i + 1, delay) for i in range(n - 1)]
        server = n - 1
        aps = {0}  # with n == 1 the lone server doubles as the access point
        return _finalize(ids, edges, server, aps, cpu, mem)

    if kind == "grid":
        w = int(params.get("width", 0))
        h = int(params.get("height", 0))
        if w < 1 or h < 1 or w * h < 2:
            raise TopologyError("grid topology needs width*height >= 2")
        ids = list(range(w * h))
        edges = []
        for r in range(h):
            for c in range(w):
                nid = r * w + c
                if c + 1 < w:
                    edges.append((nid, nid + 1, delay))
                if r + 1 < h:
                    edges.append((nid, nid + w, delay))
        server = 0
        degree = {i: 0 for i in ids}
        for u, v, _ in edges:
            degree[u] += 1
            degree[v] += 1
        leafs = {i for i in ids if degree[i] == 1 and i != server}
        if leafs:
            aps = leafs
        else:
            aps = {
                r * w + c
                for r in range(h)
                for c in range(w)
                if (r in (0, h - 1) or c in (0, w - 1)) and r * w + c != server
            }
        return _finalize(ids, edges, server, aps, cpu, mem)

    if kind == "tree":
        b = int(params.get("branching", 0))
        d = int(params.get("depth", -1))
        if b < 1 or d < 0:
            raise TopologyError("tree topology needs branching >= 1 and depth >= 0")
        ids = [0]
        edges = []
        frontier = [0]
        next_id = 1
        for _ in range(d):
            new_frontier = []
            for parent in frontier:
                for _ in range(b):
                    edges.append((parent, next_id, delay))
                    new_frontier.append(next_id)
                    next_id += 1
            frontier = new_frontier
        ids = list(range(next_id))
        server = next_id - 1  # deepest, highest-numbered leaf (max eccentricity)
        if d == 0:
            aps = {0}
        else:
            aps = set(frontier) - {server}
            if not aps:  # b == 1 chains have a single leaf; use the root end
                aps = {0}
        return _finalize(ids, edges, server, aps, cpu, mem)

    if kind == "scale_free":
        n = int(params.get("n", 0))
        m = int(params.get("m", 2))
        if n < 2:
            raise TopologyError("scale_free topology needs n >= 2")
        if m < 1 or m >= n:
            raise TopologyError("scale_free attachment m must satisfy 1 <= m < n")
        rng = random.Random(f"{seed}|topology")
        ids = list(range(n))
        edges_set: set[tuple[int, int]] = set()
        # Preferential attachment over a repeated-endpoint urn, seeded with a
        # small clique so early picks are well defined.
        urn: list[int] = []
        seed_size = m + 1
        for u in range(seed_size):
            for v in range(u + 1, seed_size):
                edges_set.add((u, v))
                urn.extend((u, v))
        for new in range(seed_size, n):
            targets: set[int] = set()
            while len(targets) < m:
                targets.add(urn[rng.randrange(len(urn))])
            for t in sorted(targets):
                edges_set.add((t, new))
                urn.extend((t, new))
        edges = [(u, v, delay) for u, v in sorted(edges_set)]
        degree = {i: 0 for i in ids}
        for u, v, _ in edges:
            degree[u] += 1
            degree[v] += 1
        server = max(ids, key=lambda i: (degree[i], -i))
        pool = sorted(i for i in ids if degree[i] == 1 and i != server)
        if not pool:
            min_deg = min(degree[i] for i in ids if i != server)
            pool = sorted(i for i in ids if degree[i] == min_deg and i != server)
        want = params.get("access_points")
        if want is not None:
            want = int(want)
            if want < 1 or want > len(pool):
                raise TopologyError(
                    f"requested {want} access points, eligible pool has {len(pool)}"
                )
            aps = set(rng.sample(pool, want))
        else:
            aps = set(pool)
        return _finalize(ids, edges, server, aps, cpu, mem)

    raise TopologyError(f"unknown topology kind {kind!r}")


__all__ = [
    "FLAG_ACCESS_POINT",
    "FLAG_EXECUTOR",
    "FLAG_RELAY",
    "FLAG_RELAY_ACCESS_POINT",
    "NodeSpec",
    "Topology",
    "TopologyError",
    "generate_topology",
    "load_topology",
    "write_topology",
]
