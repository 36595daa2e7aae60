"""QoS-feasible simple host-to-access paths.

Reliability is handled in the log domain: ``sum(log(1 - p))`` over a path's
links is additive, so latency and log-survivability can both drive a
label-setting search with dominance pruning.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .topology import NetworkGraph

RELIABILITY_EPS = 1e-9
LATENCY_EPS = 1e-9


@dataclass(frozen=True)
class CandidatePath:
    host: int
    access: int
    nodes: tuple[int, ...]
    latencies: tuple[float, ...]
    failure_probs: tuple[float, ...]
    bandwidths: tuple[int, ...]

    @classmethod
    def from_nodes(cls, graph: NetworkGraph, nodes: Sequence[int]) -> "CandidatePath":
        links = [graph.link(i, j) for i, j in zip(nodes, nodes[1:])]
        return cls(nodes[0], nodes[-1], tuple(nodes),
                   tuple(l.latency for l in links),
                   tuple(l.failure_prob for l in links),
                   tuple(l.bandwidth for l in links))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.nodes, self.nodes[1:]))

    @cached_property
    def total_latency(self) -> float:
        return math.fsum(self.latencies)

    @cached_property
    def log_survivability(self) -> float:
        return math.fsum(math.log1p(-p) for p in self.failure_probs)

    @property
    def min_link_bandwidth(self) -> float:
        return min(self.bandwidths, default=math.inf)

    @property
    def order_key(self) -> tuple:
        return (self.total_latency, -self.log_survivability, self.nodes)

    def dominates(self, other: "CandidatePath") -> bool:
        a = (self.total_latency, -self.log_survivability, -self.min_link_bandwidth)
        b = (other.total_latency, -other.log_survivability, -other.min_link_bandwidth)
        return all(x <= y for x, y in zip(a, b)) and a != b


def path_latency(path: CandidatePath) -> float:
    return path.total_latency


def path_survivability(path: CandidatePath) -> float:
    """Probability that no link on the path fails, as a direct product."""
    prob = 1.0
    for p in path.failure_probs:
        prob *= 1.0 - p
    return prob


def reliability_feasible(path: CandidatePath, reliability: float) -> bool:
    return path.log_survivability >= math.log(reliability) - RELIABILITY_EPS


def latency_feasible(path: CandidatePath, tolerance: float) -> bool:
    return path.total_latency <= tolerance + LATENCY_EPS


class _Bounds:
    """Optimistic remaining latency and log-survivability to a fixed target.

    Computed with Dijkstra over the graph minus foreign hosts and ignoring the
    simple-path restriction, so both bounds are admissible.
    """

    def __init__(self, graph: NetworkGraph, host: int, target: int) -> None:
        self.latency = self._dijkstra(graph, host, target, lambda l: l.latency)
        self.neg_log = self._dijkstra(graph, host, target, lambda l: -math.log1p(-l.failure_prob))

    @staticmethod
    def _dijkstra(graph, host, target, weight) -> dict[int, float]:
        dist = {target: 0.0}
        heap = [(0.0, target)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist.get(v, math.inf):
                continue
            for w in graph.neighbors(v):
                if graph.is_host(w) and w != host:
                    continue
                nd = d + weight(graph.link(v, w))
                if nd < dist.get(w, math.inf):
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist


def _passable(graph: NetworkGraph, host: int, node: int) -> bool:
    return not graph.is_host(node) or node == host


def _check_endpoints(graph: NetworkGraph, host: int, access: int) -> None:
    graph.kind(host)
    graph.kind(access)
    if not graph.is_host(host):
        raise ValueError(f"node {host} is not a host")


def pareto_paths(graph: NetworkGraph, host: int, access: int,
                 latency_tolerance: float, reliability: float) -> list[CandidatePath]:
    """All feasible paths not dominated in (latency, -log survival, -bottleneck bandwidth).

    Labels are settled in lexicographic order of their criteria vector, so a
    settled label can never be dominated later. Only walks that are simple are
    generated; a walk with a cycle is dominated by its cycle-free shortcut
    anyway because every link has positive latency.
    """
    _check_endpoints(graph, host, access)
    max_lat = latency_tolerance + LATENCY_EPS
    min_log = math.log(reliability) - RELIABILITY_EPS
    bounds = _Bounds(graph, host, access)
    if host not in bounds.latency:
        return []

    # label: (latency, -log_surv, -bandwidth, nodes)
    labels: dict[int, list[tuple]] = {}
    dead: set[int] = set()
    heap: list[tuple] = []
    counter = 0

    def dominated(vec, at):
        for other in labels.get(at, ()):
            if id(other) in dead:
                continue
            o = other[:3]
            if all(x <= y for x, y in zip(o, vec)) and o != vec:
                return True
        return False

    start = (0.0, 0.0, -math.inf, (host,))
    labels[host] = [start]
    heapq.heappush(heap, (start[:3], start[3], counter, start))
    settled_at_target: list[tuple] = []

    while heap:
        _, _, _, label = heapq.heappop(heap)
        if id(label) in dead:
            continue
        lat, nlog, nbw, nodes = label
        v = nodes[-1]
        if v == access:
            settled_at_target.append(label)
            continue
        for w in sorted(graph.neighbors(v)):
            if w in nodes or not _passable(graph, host, w):
                continue
            if w not in bounds.latency:
                continue
            link = graph.link(v, w)
            nlat = lat + link.latency
            nl = nlog - math.log1p(-link.failure_prob)
            if nlat + bounds.latency[w] > max_lat or -(nl + bounds.neg_log[w]) < min_log:
                continue
            vec = (nlat, nl, max(nbw, -link.bandwidth))
            if dominated(vec, w):
                continue
            for other in labels.get(w, ()):
                o = other[:3]
                if id(other) not in dead and all(x <= y for x, y in zip(vec, o)) and o != vec:
                    dead.add(id(other))
            new = (*vec, nodes + (w,))
            labels.setdefault(w, []).append(new)
            counter += 1
            heapq.heappush(heap, (vec, new[3], counter, new))

    paths = [CandidatePath.from_nodes(graph, lab[3]) for lab in settled_at_target]
    paths = [p for p in paths
             if latency_feasible(p, latency_tolerance) and reliability_feasible(p, reliability)]
    # Re-filter with exactly summed criteria; incremental sums may differ in the last ulp.
    front = [p for p in paths if not any(q.dominates(p) for q in paths)]
    return sorted(front, key=lambda p: p.order_key)


def iter_feasible_paths(graph: NetworkGraph, host: int, access: int,
                        latency_tolerance: float, reliability: float) -> Iterator[CandidatePath]:
    """Feasible simple paths in (approximately) non-decreasing latency order.

    Best-first over partial paths keyed by latency-so-far plus the optimistic
    remaining latency. Callers needing the exact order key must collect a
    little past their cut-off and sort; see :func:`qos_candidate_paths`.
    """
    _check_endpoints(graph, host, access)
    max_lat = latency_tolerance + LATENCY_EPS
    min_log = math.log(reliability) - RELIABILITY_EPS
    bounds = _Bounds(graph, host, access)
    if host not in bounds.latency:
        return
    heap = [(bounds.latency[host], (host,), 0.0, 0.0)]
    while heap:
        f, nodes, lat, log_s = heapq.heappop(heap)
        v = nodes[-1]
        if v == access:
            path = CandidatePath.from_nodes(graph, nodes)
            if latency_feasible(path, latency_tolerance) and reliability_feasible(path, reliability):
                yield path
            continue
        for w in graph.neighbors(v):
            if w in nodes or not _passable(graph, host, w) or w not in bounds.latency:
                continue
            link = graph.link(v, w)
            nlat = lat + link.latency
            nlog = log_s + math.log1p(-link.failure_prob)
            if nlat + bounds.latency[w] > max_lat or nlog - bounds.neg_log[w] < min_log:
                continue
            heapq.heappush(heap, (nlat + bounds.latency[w], nodes + (w,), nlat, nlog))


def all_feasible_paths(graph: NetworkGraph, host: int, access: int,
                       latency_tolerance: float, reliability: float) -> list[CandidatePath]:
    """Every feasible simple path, sorted by the pool order."""
    return sorted(iter_feasible_paths(graph, host, access, latency_tolerance, reliability),
                  key=lambda p: p.order_key)


def qos_candidate_paths(graph: NetworkGraph, host: int, access: int,
                        latency_tolerance: float, reliability: float,
                        k: int | None = 8) -> list[CandidatePath]:
    """Up to ``k`` feasible simple paths from ``host`` to ``access``.

    The Pareto front (latency, reliability, bottleneck bandwidth) always comes
    first; when it has fewer than ``k`` members the remaining slots go to the
    next feasible paths in pool order (latency, then reliability, then node
    sequence). ``k=None`` returns every feasible simple path.
    """
    if k is None:
        return all_feasible_paths(graph, host, access, latency_tolerance, reliability)
    if k < 1:
        raise ValueError("k must be positive")
    front = pareto_paths(graph, host, access, latency_tolerance, reliability)
    if len(front) >= k:
        return front[:k]

    need = k - len(front)
    in_front = {p.nodes for p in front}
    extra: list[CandidatePath] = []
    cutoff = math.inf
    for path in iter_feasible_paths(graph, host, access, latency_tolerance, reliability):
        if path.total_latency > cutoff + 1e-9:
            break
        if path.nodes in in_front:
            continue
        extra.append(path)
        if len(extra) == need:
            cutoff = max(p.total_latency for p in extra)
    extra.sort(key=lambda p: p.order_key)
    return sorted(front + extra[:need], key=lambda p: p.order_key)
