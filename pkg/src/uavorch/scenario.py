"""Seeded scenario generation and the scenario JSON document.

Draw order is part of the contract (same seed, same bytes), so it is fixed:

1. transit core: uniform spanning tree over the non-aggregation core nodes
   (random Pruefer sequence), then extra uniform random links until the mean
   core degree reaches ``core_degree``;
2. each aggregation transit node links to one uniformly chosen core node;
3. base station ``i`` links to aggregation node ``i mod n_agg``;
4. BS edge host ``k`` links to base station ``k``; aggregation host ``k`` to
   aggregation node ``k``; each cloud host to a uniformly chosen core node;
5. host capacities and costs, in host id order;
6. UAVs, in id order.

Link attributes (latency, failure probability, bandwidth) are drawn at the
moment each link is created. Drawn floats are rounded to 12 significant
digits so that the in-memory scenario equals its serialized form.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import jsonio
from .fleet import (AttachmentSchedule, FlightPlan, TimeHorizon, UavDemand,
                    derive_attachment_schedule)
from .rng import SplitMix64
from .topology import (HostSpec, LinkSpec, NetworkGraph, NodeKind,
                       validate_topology)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioParams:
    base_stations: int = 20
    edge_hosts: int = 20
    aggregation_hosts: int = 3
    cloud_hosts: int = 15
    core_nodes: int = 37  # includes the aggregation points
    core_degree: float = 3.0

    edge_capacity: tuple[int, int] = (200, 400)
    edge_cost: tuple[int, int] = (500, 1000)
    agg_capacity: tuple[int, int] = (400, 800)
    agg_cost: tuple[int, int] = (250, 500)
    cloud_capacity: tuple[int, int] = (800, 1600)
    cloud_cost: tuple[int, int] = (100, 300)

    link_latency_ms: tuple[float, float] = (1.0, 3.0)
    link_failure_prob: tuple[float, float] = (0.0, 0.01)
    link_bandwidth_mbps: tuple[int, int] = (1000, 10000)

    periods: int = 30
    period_length_s: float = 60.0

    uavs: int = 5
    uav_demand: tuple[int, int] = (10, 20)
    uav_bandwidth_mbps: tuple[int, int] = (50, 100)
    uav_reliability: tuple[float, float] = (0.95, 0.99)
    uav_latency_ms: tuple[float, float] = (1.0, 50.0)
    mission_length: tuple[int, int] = (1, 4)

    seed: int = 0

    def check(self) -> None:
        counts = {
            "base_stations": self.base_stations, "edge_hosts": self.edge_hosts,
            "aggregation_hosts": self.aggregation_hosts, "cloud_hosts": self.cloud_hosts,
            "core_nodes": self.core_nodes, "periods": self.periods,
        }
        for name, value in counts.items():
            if value <= 0:
                raise ScenarioError(f"{name} must be > 0, got {value}")
        if self.uavs < 0:
            raise ScenarioError("uavs must be >= 0")
        if self.edge_hosts > self.base_stations:
            raise ScenarioError(
                f"{self.edge_hosts} BS edge hosts cannot be co-located 1:1 with "
                f"{self.base_stations} base stations"
            )
        if self.core_nodes <= self.aggregation_hosts:
            raise ScenarioError("core_nodes must exceed aggregation_hosts (aggregation points are core nodes)")
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple) and value[0] > value[1]:
                raise ScenarioError(f"{f.name}: empty range {value}")
        if self.mission_length[0] < 1:
            raise ScenarioError("mission_length must be at least one stop")
        if self.mission_length[0] > 1 and self.base_stations < 2:
            raise ScenarioError("multi-stop missions need at least two base stations")
        if self.mission_length[1] > self.periods:
            raise ScenarioError("mission_length cannot exceed the number of periods")
        if not (0 < self.uav_reliability[0] and self.uav_reliability[1] <= 1):
            raise ScenarioError("uav_reliability must lie in (0, 1]")
        if not (0 <= self.link_failure_prob[0] and self.link_failure_prob[1] < 1):
            raise ScenarioError("link_failure_prob must lie in [0, 1)")

    def replace(self, **changes: Any) -> "ScenarioParams":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict[str, Any]:
        return {f.name: (list(v) if isinstance(v, tuple) else v)
                for f in dataclasses.fields(self) for v in [getattr(self, f.name)]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ScenarioParams":
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name in data:
                v = data[f.name]
                kwargs[f.name] = tuple(v) if isinstance(v, list) else v
        return cls(**kwargs)


def table1_params(**overrides: Any) -> ScenarioParams:
    """Simulation parameters exactly as tabulated for the full-scale evaluation."""
    return ScenarioParams().replace(**overrides)


def desk_params(**overrides: Any) -> ScenarioParams:
    """Shrunken topology that the exact solver handles in seconds."""
    base = ScenarioParams(
        base_stations=8, edge_hosts=8, aggregation_hosts=2, cloud_hosts=4,
        core_nodes=12, periods=10, uavs=4, mission_length=(1, 3),
    )
    return base.replace(**overrides)


PROFILES = {"table1": table1_params, "desk": desk_params}


@dataclass(frozen=True)
class Scenario:
    graph: NetworkGraph
    uavs: tuple[UavDemand, ...]
    plans: tuple[FlightPlan, ...]
    horizon: TimeHorizon
    seed: int = 0
    params: ScenarioParams | None = None
    schedule: AttachmentSchedule = field(init=False, compare=False)

    def __post_init__(self) -> None:
        ids = [d.uav_id for d in self.uavs]
        if ids != [p.uav_id for p in self.plans]:
            raise ScenarioError("uav demands and flight plans must list the same ids in the same order")
        if len(set(ids)) != len(ids):
            raise ScenarioError("duplicate uav ids")
        for demand, plan in zip(self.uavs, self.plans):
            demand.check()
            plan.check(self.horizon, self.graph)
        object.__setattr__(self, "schedule", derive_attachment_schedule(self.plans, self.horizon))

    def uav(self, u: int) -> UavDemand:
        for d in self.uavs:
            if d.uav_id == u:
                return d
        raise KeyError(f"unknown uav {u}")

    def plan(self, u: int) -> FlightPlan:
        for p in self.plans:
            if p.uav_id == u:
                return p
        raise KeyError(f"unknown uav {u}")

    def with_uavs(self, uavs: tuple[UavDemand, ...], plans: tuple[FlightPlan, ...]) -> "Scenario":
        return Scenario(self.graph, uavs, plans, self.horizon, self.seed, self.params)

    def to_json(self) -> dict[str, Any]:
        g = self.graph
        return {
            "nodes": [{"id": i, "kind": k.value} for i, k in enumerate(g.kinds)],
            "links": [
                {"u": l.u, "v": l.v, "latency_ms": l.latency,
                 "failure_prob": l.failure_prob, "bandwidth_mbps": l.bandwidth}
                for l in g.links
            ],
            "hosts": [{"node": h.node, "capacity": h.capacity, "unit_cost": h.unit_cost}
                      for h in g.hosts],
            "uavs": [
                {
                    "id": d.uav_id,
                    "demand": d.resource_demand,
                    "bandwidth_mbps": d.bandwidth_demand,
                    "reliability": d.reliability_demand,
                    "latency_ms": d.latency_tolerance,
                    "trajectory": [{"access": a, "arrive_period": t}
                                   for a, t in zip(p.trajectory, p.arrival_periods)],
                    "end_period": p.end_period,
                }
                for d, p in zip(self.uavs, self.plans)
            ],
            "periods": self.horizon.periods,
            "seed": self.seed,
            "params": self.params.to_json() if self.params else {},
        }

    def dumps(self) -> str:
        return jsonio.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Scenario":
        nodes = sorted(data["nodes"], key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise ScenarioError("node ids must be dense 0..N-1")
        graph = NetworkGraph(
            tuple(NodeKind(n["kind"]) for n in nodes),
            tuple(LinkSpec(int(l["u"]), int(l["v"]), float(l["latency_ms"]),
                           float(l["failure_prob"]), int(l["bandwidth_mbps"]))
                  for l in data["links"]),
            tuple(HostSpec(int(h["node"]), int(h["capacity"]), int(h["unit_cost"]))
                  for h in data["hosts"]),
        )
        uavs, plans = [], []
        for entry in data["uavs"]:
            u = int(entry["id"])
            uavs.append(UavDemand(u, int(entry["demand"]), int(entry["bandwidth_mbps"]),
                                  float(entry["reliability"]), float(entry["latency_ms"])))
            plans.append(FlightPlan(
                u,
                tuple(int(s["access"]) for s in entry["trajectory"]),
                tuple(int(s["arrive_period"]) for s in entry["trajectory"]),
                int(entry["end_period"]),
            ))
        params = ScenarioParams.from_json(data["params"]) if data.get("params") else None
        horizon = TimeHorizon(int(data["periods"]),
                              params.period_length_s if params else 60.0)
        return cls(graph, tuple(uavs), tuple(plans), horizon, int(data.get("seed", 0)), params)


def load_scenario(path: str | Path) -> Scenario:
    return Scenario.from_json(jsonio.loads(Path(path).read_text()))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(scenario.dumps())


def _uniform(rng: SplitMix64, bounds: tuple[float, float]) -> float:
    return jsonio.round_sig(rng.uniform(*bounds))


def _randint(rng: SplitMix64, bounds: tuple[int, int]) -> int:
    return rng.randint(int(bounds[0]), int(bounds[1]))


def _random_tree(rng: SplitMix64, nodes: list[int]) -> list[tuple[int, int]]:
    """Uniform labelled spanning tree of the complete graph on ``nodes`` via a Pruefer sequence."""
    n = len(nodes)
    if n == 1:
        return []
    if n == 2:
        return [(nodes[0], nodes[1])]
    seq = [rng.randint(0, n - 1) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((nodes[leaf], nodes[x]))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((nodes[u], nodes[v]))
    return edges


def generate_scenario(params: ScenarioParams) -> Scenario:
    params.check()
    rng = SplitMix64(params.seed)

    n_bs, n_core, n_agg = params.base_stations, params.core_nodes, params.aggregation_hosts
    kinds: list[NodeKind] = [NodeKind.ACCESS] * n_bs + [NodeKind.TRANSIT] * n_core
    kinds += [NodeKind.EDGE_BS] * params.edge_hosts
    kinds += [NodeKind.EDGE_AGG] * n_agg
    kinds += [NodeKind.CLOUD] * params.cloud_hosts

    access = list(range(n_bs))
    agg_points = list(range(n_bs, n_bs + n_agg))
    core = list(range(n_bs + n_agg, n_bs + n_core))
    first_host = n_bs + n_core
    edge_hosts = list(range(first_host, first_host + params.edge_hosts))
    agg_hosts = list(range(first_host + params.edge_hosts, first_host + params.edge_hosts + n_agg))
    cloud_hosts = list(range(first_host + params.edge_hosts + n_agg, len(kinds)))

    links: list[LinkSpec] = []
    present: set[tuple[int, int]] = set()

    def add_link(i: int, j: int) -> None:
        key = (min(i, j), max(i, j))
        present.add(key)
        links.append(LinkSpec(key[0], key[1],
                              _uniform(rng, params.link_latency_ms),
                              _uniform(rng, params.link_failure_prob),
                              _randint(rng, params.link_bandwidth_mbps)))

    for i, j in _random_tree(rng, core):
        add_link(i, j)
    max_core_links = len(core) * (len(core) - 1) // 2
    core_links = len(core) - 1
    while 2 * core_links < params.core_degree * len(core) and core_links < max_core_links:
        i, j = rng.choice(core), rng.choice(core)
        if i == j or (min(i, j), max(i, j)) in present:
            continue
        add_link(i, j)
        core_links += 1

    for g in agg_points:
        add_link(g, rng.choice(core))
    for idx, bs in enumerate(access):
        add_link(bs, agg_points[idx % n_agg])
    for k, h in enumerate(edge_hosts):
        add_link(h, access[k])
    for k, h in enumerate(agg_hosts):
        add_link(h, agg_points[k])
    for h in cloud_hosts:
        add_link(h, rng.choice(core))

    hosts: list[HostSpec] = []
    tiers = ((edge_hosts, params.edge_capacity, params.edge_cost),
             (agg_hosts, params.agg_capacity, params.agg_cost),
             (cloud_hosts, params.cloud_capacity, params.cloud_cost))
    for nodes, capacity, cost in tiers:
        for h in nodes:
            hosts.append(HostSpec(h, _randint(rng, capacity), _randint(rng, cost)))

    graph = NetworkGraph(tuple(kinds), tuple(links), tuple(hosts))
    report = validate_topology(graph)
    if report:
        raise ScenarioError("generated topology failed validation: " + "; ".join(report))

    uavs, plans = [], []
    for u in range(params.uavs):
        demand, plan = _draw_uav(rng, u, params, access)
        uavs.append(demand)
        plans.append(plan)

    return Scenario(graph, tuple(uavs), tuple(plans),
                    TimeHorizon(params.periods, params.period_length_s),
                    params.seed, params)


def _draw_uav(rng: SplitMix64, u: int, params: ScenarioParams,
              access: list[int]) -> tuple[UavDemand, FlightPlan]:
    demand = UavDemand(
        uav_id=u,
        resource_demand=_randint(rng, params.uav_demand),
        bandwidth_demand=_randint(rng, params.uav_bandwidth_mbps),
        reliability_demand=_uniform(rng, params.uav_reliability),
        latency_tolerance=_uniform(rng, params.uav_latency_ms),
    )
    stops = _randint(rng, params.mission_length)
    trajectory = [rng.choice(access)]
    while len(trajectory) < stops:
        nxt = rng.choice(access)
        if nxt != trajectory[-1]:
            trajectory.append(nxt)
    max_dwell = max(1, params.periods // stops)
    dwells = [rng.randint(1, max_dwell) for _ in range(stops)]
    start = rng.randint(1, params.periods - sum(dwells) + 1)
    arrivals, t = [], start
    for d in dwells:
        arrivals.append(t)
        t += d
    plan = FlightPlan(u, tuple(trajectory), tuple(arrivals), t - 1)
    return demand, plan
