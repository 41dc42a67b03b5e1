"""In-network computation offloading toolkit.

Subpackages by concern:

* ``topology``: network graphs, roles, shortest-path routing
* ``workload``: arrival streams and per-node rate/service estimation
* ``control``: admission strategies (none, passive, proactive) and gossip
* ``simulator``: discrete-event engine, presets, metrics, exports
* ``partition``: call graphs, betweenness clustering, modularity
* ``decision``: offload validity gates and partition selection
* ``appstats``: package overlap and dedup storage savings
* ``cli``: the ``offloadsim`` command
"""

__version__ = "0.1.0"
