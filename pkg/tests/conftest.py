"""Shared fixtures and small builders used across the test modules."""

import pytest

from offloadsim.partition import CallGraph, ClassNode, MethodProfile
from offloadsim.topology import NodeSpec, Topology


def make_graph(edges, isolated=(), methods=None, tags=None):
    """Build a CallGraph from (u, v, weight) triples plus optional extras.

    ``methods`` maps class name to a list of MethodProfile kwargs dicts;
    ``tags`` maps class name to a tag set.
    """
    g = CallGraph()
    names = set(isolated)
    for u, v, _ in edges:
        names.add(u)
        names.add(v)
    for name in sorted(names):
        profs = [MethodProfile(**kw) for kw in (methods or {}).get(name, [])]
        g.add_class(ClassNode(name=name, tags=set((tags or {}).get(name, ())),
                              methods=profs))
    for u, v, w in edges:
        g.add_call(u, v, w)
    return g


def line_topology(n, cpu=1.0, mem=1.0, delay=1.0):
    """n nodes in a path, node 0 the access point, node n-1 the server."""
    nodes = [
        NodeSpec(i, cpu_capacity=cpu, mem_capacity=mem, is_access_point=(i == 0))
        for i in range(n)
    ]
    edges = [(i, i + 1, delay) for i in range(n - 1)]
    return Topology(nodes, edges, server_id=n - 1)


@pytest.fixture
def line4():
    return line_topology(4)
