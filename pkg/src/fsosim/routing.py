"""Latency-shortest paths over a snapshot's connectivity graph.

Edge weight is the link propagation delay; every arrival at a satellite
additionally pays the per-hop node delay, while ground stations pay none.
A path's latency is therefore its total propagation delay plus
node_delay * hops, with hops counting the satellites visited. The node
charge is folded into the edges as an enter cost, which keeps the problem
a plain weighted digraph; arcs that would route *through* a station are
dropped, so ground stations can only ever terminate a path.

Three implementations share the objective:

* ``shortest_path``       - compiled sparse Dijkstra, used by scenario runs;
* ``shortest_path_exact`` - reference Dijkstra with a fully specified total
  order among equal-latency paths (fewest hops, then smallest node-index
  sequence);
* ``oracle_shortest_path`` - exhaustive simple-path enumeration for graphs
  of at most 12 nodes, used as an independent test oracle.

All three accept either a GraphSnapshot or a hand-built RouteGraph and
return identical latencies; the compiled route may differ from the exact
one only in which equal-latency path it reports.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sparse_dijkstra

from .geometry import SPEED_OF_LIGHT_MPS
from .links import GraphSnapshot

ORACLE_MAX_NODES = 12


@dataclass(frozen=True)
class PathResult:
    """One station-to-station path with its delay breakdown."""

    node_sequence: tuple[str, ...]
    hop_count: int
    propagation_delay_ms: float
    node_delay_ms: float
    latency_ms: float


@dataclass(frozen=True)
class RouteGraph:
    """Undirected weighted graph with satellite/station node kinds."""

    is_satellite: np.ndarray  # bool per node
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_length_km: np.ndarray
    c_mps: float = SPEED_OF_LIGHT_MPS
    name_of: Callable[[int], str] = field(default=str)
    positions_km: np.ndarray | None = None

    @property
    def node_count(self) -> int:
        return len(self.is_satellite)

    @classmethod
    def from_snapshot(cls, snapshot: GraphSnapshot) -> "RouteGraph":
        n_sat = snapshot.satellite_count
        gs_node = snapshot.gs_station_index.astype(np.int64) + n_sat
        kinds = np.zeros(snapshot.node_count, dtype=bool)
        kinds[:n_sat] = True
        return cls(
            is_satellite=kinds,
            edge_u=np.concatenate([snapshot.sat_a.astype(np.int64),
                                   snapshot.gs_sat_index.astype(np.int64)]),
            edge_v=np.concatenate([snapshot.sat_b.astype(np.int64), gs_node]),
            edge_length_km=np.concatenate([snapshot.sat_length_km, snapshot.gs_length_km]),
            c_mps=snapshot.constants.c_mps,
            name_of=snapshot.node_name,
            positions_km=snapshot._position_table)


def _as_graph(graph) -> RouteGraph:
    if isinstance(graph, GraphSnapshot):
        return RouteGraph.from_snapshot(graph)
    return graph


def _resolve(graph, raw, node) -> int:
    if isinstance(graph, GraphSnapshot):
        return graph.node_index(node)
    if isinstance(node, (int, np.integer)):
        if not 0 <= node < raw.node_count:
            raise KeyError(f"node index {node} out of range")
        return int(node)
    for k in range(raw.node_count):
        if raw.name_of(k) == node:
            return k
    raise KeyError(f"node {node!r} not present in graph")


def _directed_arcs(graph: RouteGraph, src: int, dst: int, node_delay_per_hop_ms: float):
    """Directed arcs (tail, head, weight) with node delay charged on
    satellite entry; arcs through interior stations are dropped."""
    prop = graph.edge_length_km * (1e6 / graph.c_mps)
    enter = np.where(graph.is_satellite, node_delay_per_hop_ms, 0.0)
    tails = np.concatenate([graph.edge_u, graph.edge_v])
    heads = np.concatenate([graph.edge_v, graph.edge_u])
    weights = np.concatenate([prop, prop]) + enter[heads]
    station = ~graph.is_satellite
    keep = ~(station[heads] & (heads != dst)) & ~(station[tails] & (tails != src))
    return tails[keep], heads[keep], weights[keep]


def _result_from_nodes(graph: RouteGraph, nodes: list[int],
                       node_delay_per_hop_ms: float,
                       length_of: dict[tuple[int, int], float]) -> PathResult:
    prop_ms = 0.0
    per_km = 1e6 / graph.c_mps
    for u, v in zip(nodes, nodes[1:]):
        prop_ms += length_of[(u, v)] * per_km
    hops = int(sum(1 for k in nodes if graph.is_satellite[k]))
    node_ms = node_delay_per_hop_ms * hops
    return PathResult(
        node_sequence=tuple(graph.name_of(k) for k in nodes),
        hop_count=hops,
        propagation_delay_ms=prop_ms,
        node_delay_ms=node_ms,
        latency_ms=prop_ms + node_ms)


def _length_lookup(graph: RouteGraph, nodes: list[int]) -> dict[tuple[int, int], float]:
    on_path = np.isin(graph.edge_u, nodes) & np.isin(graph.edge_v, nodes)
    found: dict[tuple[int, int], float] = {}
    for u, v, length in zip(graph.edge_u[on_path], graph.edge_v[on_path],
                            graph.edge_length_km[on_path]):
        length = float(length)
        found[(int(u), int(v))] = length
        found[(int(v), int(u))] = length
    return found


def _endpoints(graph, raw: RouteGraph, src, dst) -> tuple[int, int]:
    s = _resolve(graph, raw, src)
    d = _resolve(graph, raw, dst)
    if s == d:
        raise ValueError("source and destination must differ")
    return s, d


def shortest_path(graph, src, dst, node_delay_per_hop_ms: float = 10.0) -> PathResult | None:
    """Minimum-latency path between two stations, or None if unreachable.

    Deterministic for a given graph; among equal-latency paths the choice is
    implementation-defined (see shortest_path_exact for the fully specified
    ordering).
    """
    raw = _as_graph(graph)
    s, d = _endpoints(graph, raw, src, dst)
    tails, heads, weights = _directed_arcs(raw, s, d, node_delay_per_hop_ms)
    n = raw.node_count
    matrix = csr_matrix((weights, (tails, heads)), shape=(n, n))
    dist, pred = _sparse_dijkstra(matrix, directed=True, indices=s, return_predecessors=True)
    if not np.isfinite(dist[d]):
        return None
    nodes = [d]
    while nodes[-1] != s:
        nodes.append(int(pred[nodes[-1]]))
    nodes.reverse()
    return _result_from_nodes(raw, nodes, node_delay_per_hop_ms, _length_lookup(raw, nodes))


def shortest_path_exact(graph, src, dst, node_delay_per_hop_ms: float = 10.0) -> PathResult | None:
    """Reference minimum-latency path with a total tie order.

    Paths are ranked by (latency, hop count, node-index sequence); the
    returned path is the unique minimum under that order.
    """
    raw = _as_graph(graph)
    s, d = _endpoints(graph, raw, src, dst)
    tails, heads, weights = _directed_arcs(raw, s, d, node_delay_per_hop_ms)
    order = np.argsort(tails, kind="stable")
    tails, heads, weights = tails[order], heads[order], weights[order]
    n = raw.node_count
    indptr = np.searchsorted(tails, np.arange(n + 1))
    sat = raw.is_satellite

    inf = math.inf
    dist: list[tuple[float, float]] = [(inf, inf)] * n
    parent = [-1] * n
    dist[s] = (0.0, 0)
    heap: list[tuple[float, int, int]] = [(0.0, 0, s)]

    def path_to(node: int) -> list[int]:
        nodes = [node]
        while nodes[-1] != s:
            nodes.append(parent[nodes[-1]])
        nodes.reverse()
        return nodes

    while heap:
        lat, hops, u = heapq.heappop(heap)
        if (lat, hops) > dist[u]:
            continue
        if u == d:
            break
        for k in range(indptr[u], indptr[u + 1]):
            v = int(heads[k])
            cand = (lat + float(weights[k]), hops + (1 if sat[v] else 0))
            if cand < dist[v]:
                dist[v] = cand
                parent[v] = u
                heapq.heappush(heap, (cand[0], cand[1], v))
            elif cand == dist[v] and parent[v] != u and path_to(u) < path_to(parent[v]):
                parent[v] = u
    if dist[d][0] == inf:
        return None
    nodes = path_to(d)
    return _result_from_nodes(raw, nodes, node_delay_per_hop_ms, _length_lookup(raw, nodes))


def oracle_shortest_path(graph, src, dst, node_delay_per_hop_ms: float = 10.0) -> PathResult | None:
    """Exhaustive enumeration of all simple paths; test oracle only.

    Refuses graphs with more than 12 nodes. Uses the same
    (latency, hops, node-index sequence) ranking as shortest_path_exact and
    accumulates latency left-to-right along each path, so results are
    float-for-float comparable with the Dijkstra implementations.
    """
    raw = _as_graph(graph)
    if raw.node_count > ORACLE_MAX_NODES:
        raise ValueError(f"oracle refuses graphs with more than {ORACLE_MAX_NODES} nodes")
    s, d = _endpoints(graph, raw, src, dst)
    tails, heads, weights = _directed_arcs(raw, s, d, node_delay_per_hop_ms)
    adjacency: dict[int, list[tuple[int, float]]] = {}
    for t_, h_, w_ in zip(tails, heads, weights):
        adjacency.setdefault(int(t_), []).append((int(h_), float(w_)))
    for neighbors in adjacency.values():
        neighbors.sort()
    sat = raw.is_satellite

    best: tuple[float, int, tuple[int, ...]] | None = None

    def walk(u: int, visited: set[int], lat: float, hops: int, trail: list[int]):
        nonlocal best
        if u == d:
            candidate = (lat, hops, tuple(trail))
            if best is None or candidate < best:
                best = candidate
            return
        for v, w in adjacency.get(u, ()):
            if v in visited:
                continue
            visited.add(v)
            trail.append(v)
            walk(v, visited, lat + w, hops + (1 if sat[v] else 0), trail)
            trail.pop()
            visited.remove(v)

    walk(s, {s}, 0.0, 0, [s])
    if best is None:
        return None
    nodes = list(best[2])
    return _result_from_nodes(raw, nodes, node_delay_per_hop_ms, _length_lookup(raw, nodes))
