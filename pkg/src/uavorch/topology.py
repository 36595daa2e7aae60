"""NFV infrastructure graph: access, transit and host nodes joined by QoS-weighted links."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx


class TopologyError(ValueError):
    """Raised when a graph cannot be constructed at all."""


class NodeKind(str, enum.Enum):
    ACCESS = "access"
    TRANSIT = "transit"
    EDGE_BS = "edge_bs"
    EDGE_AGG = "edge_agg"
    CLOUD = "cloud"

    @property
    def is_host(self) -> bool:
        return self in HOST_KINDS


HOST_KINDS = frozenset({NodeKind.EDGE_BS, NodeKind.EDGE_AGG, NodeKind.CLOUD})

# Which node kind each host tier must hang off.
ATTACHMENT_KIND = {
    NodeKind.EDGE_BS: NodeKind.ACCESS,
    NodeKind.EDGE_AGG: NodeKind.TRANSIT,
    NodeKind.CLOUD: NodeKind.TRANSIT,
}


@dataclass(frozen=True)
class HostSpec:
    node: int
    capacity: int
    unit_cost: int


@dataclass(frozen=True)
class LinkSpec:
    """Undirected link. Endpoints are normalized so that ``u < v``."""

    u: int
    v: int
    latency: float
    failure_prob: float
    bandwidth: int

    def __post_init__(self) -> None:
        if self.u > self.v:
            a, b = self.v, self.u
            object.__setattr__(self, "u", a)
            object.__setattr__(self, "v", b)

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v)


def link_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class NetworkGraph:
    """Immutable infrastructure graph.

    Node ids are dense indices into ``kinds``. Construction rejects structural
    defects (unknown endpoints, self-loops, parallel links, host nodes with no
    spec or no link at all); range and connectivity problems are left for
    :func:`validate_topology` to report.
    """

    kinds: tuple[NodeKind, ...]
    links: tuple[LinkSpec, ...]
    hosts: tuple[HostSpec, ...]
    _adj: dict = field(init=False, repr=False, compare=False)
    _link_index: dict = field(init=False, repr=False, compare=False)
    _host_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.kinds)
        adj: dict[int, set[int]] = {i: set() for i in range(n)}
        index: dict[tuple[int, int], int] = {}
        for pos, link in enumerate(self.links):
            if not (0 <= link.u < n and 0 <= link.v < n):
                raise TopologyError(f"link {link.key} references an unknown node")
            if link.u == link.v:
                raise TopologyError(f"self-loop at node {link.u}")
            if link.key in index:
                raise TopologyError(f"duplicate link {link.key}")
            index[link.key] = pos
            adj[link.u].add(link.v)
            adj[link.v].add(link.u)

        hosts: dict[int, HostSpec] = {}
        for spec in self.hosts:
            if not (0 <= spec.node < n) or not self.kinds[spec.node].is_host:
                raise TopologyError(f"host spec for non-host node {spec.node}")
            if spec.node in hosts:
                raise TopologyError(f"duplicate host spec for node {spec.node}")
            hosts[spec.node] = spec
        for i, kind in enumerate(self.kinds):
            if kind.is_host:
                if i not in hosts:
                    raise TopologyError(f"host node {i} has no capacity/cost spec")
                if not adj[i]:
                    raise TopologyError(f"host node {i} is not attached to the network")

        object.__setattr__(self, "_adj", {i: frozenset(s) for i, s in adj.items()})
        object.__setattr__(self, "_link_index", index)
        object.__setattr__(self, "_host_index", hosts)

    @property
    def num_nodes(self) -> int:
        return len(self.kinds)

    def kind(self, i: int) -> NodeKind:
        self._check_node(i)
        return self.kinds[i]

    def neighbors(self, i: int) -> frozenset[int]:
        self._check_node(i)
        return self._adj[i]

    def link(self, i: int, j: int) -> LinkSpec:
        try:
            return self.links[self._link_index[link_key(i, j)]]
        except KeyError:
            raise KeyError(f"no link between {i} and {j}") from None

    def link_position(self, i: int, j: int) -> int:
        return self._link_index[link_key(i, j)]

    def has_link(self, i: int, j: int) -> bool:
        return link_key(i, j) in self._link_index

    def host(self, h: int) -> HostSpec:
        try:
            return self._host_index[h]
        except KeyError:
            raise KeyError(f"node {h} is not a host") from None

    def is_host(self, i: int) -> bool:
        return i in self._host_index

    def nodes_of(self, *kinds: NodeKind) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k in kinds]

    @property
    def access_nodes(self) -> list[int]:
        return self.nodes_of(NodeKind.ACCESS)

    @property
    def host_nodes(self) -> list[int]:
        return sorted(self._host_index)

    def directed_edges(self) -> list[tuple[int, int]]:
        """Both orientations of every link, sorted."""
        out = []
        for link in self.links:
            out.append((link.u, link.v))
            out.append((link.v, link.u))
        return sorted(out)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        for link in self.links:
            g.add_edge(link.u, link.v, latency=link.latency,
                       failure_prob=link.failure_prob, bandwidth=link.bandwidth)
        return g

    def _check_node(self, i: int) -> None:
        if not (isinstance(i, int) and 0 <= i < len(self.kinds)):
            raise KeyError(f"unknown node id {i!r}")


def neighbors(graph: NetworkGraph, i: int) -> frozenset[int]:
    return graph.neighbors(i)


def validate_topology(graph: NetworkGraph) -> list[str]:
    """Return one message per violated graph invariant; empty means valid."""
    problems: list[str] = []
    for link in graph.links:
        name = f"link {link.u}-{link.v}"
        if not link.latency > 0:
            problems.append(f"{name}: latency {link.latency} must be > 0")
        if not 0 <= link.failure_prob < 1:
            problems.append(f"{name}: failure_prob {link.failure_prob} outside [0, 1)")
        if not link.bandwidth > 0:
            problems.append(f"{name}: bandwidth {link.bandwidth} must be > 0")

    for spec in graph.hosts:
        if spec.capacity <= 0:
            problems.append(f"host {spec.node}: capacity {spec.capacity} must be > 0")
        if spec.unit_cost <= 0:
            problems.append(f"host {spec.node}: unit_cost {spec.unit_cost} must be > 0")
        kind = graph.kinds[spec.node]
        attached = graph.neighbors(spec.node)
        if len(attached) != 1:
            problems.append(f"host {spec.node}: expected exactly one attachment link, found {len(attached)}")
        elif graph.kinds[next(iter(attached))] is not ATTACHMENT_KIND[kind]:
            problems.append(
                f"host {spec.node}: {kind.value} host must attach to a "
                f"{ATTACHMENT_KIND[kind].value} node"
            )

    if graph.num_nodes:
        g = graph.to_networkx()
        components = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
        if len(components) > 1:
            stray = [c for c in components[1:]]
            problems.append(
                "graph is disconnected: nodes "
                + "; ".join(",".join(map(str, c)) for c in stray)
                + f" unreachable from node {components[0][0]}"
            )
    return problems


def build_graph(kinds: Iterable[NodeKind | str], links: Iterable[LinkSpec],
                hosts: Iterable[HostSpec]) -> NetworkGraph:
    return NetworkGraph(tuple(NodeKind(k) for k in kinds), tuple(links), tuple(hosts))
