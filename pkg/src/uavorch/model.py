"""Placement problem assembly, objective evaluation, and constraint checking."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .fleet import dwell_periods
from .paths import LATENCY_EPS, RELIABILITY_EPS, CandidatePath, qos_candidate_paths
from .scenario import Scenario

CONSTRAINT_IDS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10",
                  "C11", "C12", "C18", "simple-path", "structure")


class AssemblyError(ValueError):
    """Some (uav, access) pair has no host reachable within its QoS bounds."""

    def __init__(self, witnesses: list[tuple[int, int]]):
        self.witnesses = witnesses
        u, a = witnesses[0]
        more = f" (+{len(witnesses) - 1} more)" if len(witnesses) > 1 else ""
        super().__init__(f"no QoS-feasible host for uav {u} at access node {a}{more}")


class PathPool:
    """Memoized candidate paths keyed by (host, access, latency tolerance, reliability)."""

    def __init__(self, scenario: Scenario, k: int | None) -> None:
        self.graph = scenario.graph
        self.k = k
        self._cache: dict[tuple, tuple[CandidatePath, ...]] = {}

    def get(self, host: int, access: int, latency: float, reliability: float) -> tuple[CandidatePath, ...]:
        key = (host, access, latency, reliability)
        if key not in self._cache:
            self._cache[key] = tuple(qos_candidate_paths(
                self.graph, host, access, latency, reliability, self.k))
        return self._cache[key]

    def __len__(self) -> int:
        return len(self._cache)


@dataclass(frozen=True)
class PlacementProblem:
    scenario: Scenario
    k_paths: int | None
    pairs: tuple[tuple[int, int], ...]
    # (u, a) -> ((host, paths), ...) for hosts with at least one feasible path
    candidates: Mapping[tuple[int, int], tuple[tuple[int, tuple[CandidatePath, ...]], ...]]
    witnesses: tuple[tuple[int, int], ...] = ()
    pool: PathPool | None = field(default=None, compare=False, repr=False)

    @property
    def graph(self):
        return self.scenario.graph

    def dwell(self, u: int, a: int) -> int:
        return dwell_periods(self.scenario.schedule, u, a)

    def pair_cost(self, u: int, a: int, h: int) -> int:
        return self.dwell(u, a) * self.scenario.uav(u).resource_demand * self.graph.host(h).unit_cost


def uav_access_pairs(scenario: Scenario) -> tuple[tuple[int, int], ...]:
    return tuple((p.uav_id, a) for p in scenario.plans for a in p.stops)


def assemble_problem(scenario: Scenario, k_paths: int | None = 8, strict: bool = True) -> PlacementProblem:
    """Build the candidate (host, path) sets for every (uav, access) pair.

    With ``strict`` an empty candidate set raises :class:`AssemblyError`;
    otherwise the offending pairs are recorded as ``witnesses``.
    """
    pool = PathPool(scenario, k_paths)
    hosts = scenario.graph.host_nodes
    pairs = uav_access_pairs(scenario)
    candidates = {}
    witnesses = []
    for u, a in pairs:
        demand = scenario.uav(u)
        options = []
        for h in hosts:
            paths = pool.get(h, a, demand.latency_tolerance, demand.reliability_demand)
            if paths:
                options.append((h, paths))
        if not options:
            witnesses.append((u, a))
        candidates[(u, a)] = tuple(options)
    if witnesses and strict:
        raise AssemblyError(witnesses)
    return PlacementProblem(scenario, k_paths, pairs, candidates, tuple(witnesses), pool)


def bare_problem(scenario: Scenario) -> PlacementProblem:
    """A problem without a path pool; enough for objective evaluation and validation."""
    return PlacementProblem(scenario, None, uav_access_pairs(scenario), {}, (), None)


@dataclass(frozen=True)
class PlacementSolution:
    """Decision variables in sparse form.

    ``placements[u]`` holds the hosts with X=1, ``serving[(u, a)]`` the hosts
    with K=1 (a feasible solution has exactly one), and ``routes[(u, h, a)]``
    the directed link uses with Y=1.
    """

    placements: Mapping[int, frozenset[int]]
    serving: Mapping[tuple[int, int], frozenset[int]]
    routes: Mapping[tuple[int, int, int], tuple[tuple[int, int], ...]]
    objective_value: int | None = None

    @classmethod
    def from_assignment(cls, problem: PlacementProblem,
                        assignment: Mapping[tuple[int, int], CandidatePath]) -> "PlacementSolution":
        placements: dict[int, set[int]] = {d.uav_id: set() for d in problem.scenario.uavs}
        serving, routes = {}, {}
        for (u, a), path in assignment.items():
            placements[u].add(path.host)
            serving[(u, a)] = frozenset({path.host})
            routes[(u, path.host, a)] = path.edges
        sol = cls({u: frozenset(hs) for u, hs in placements.items()}, serving, routes)
        return sol.with_objective(objective_cost(problem, sol))

    def with_objective(self, value: int) -> "PlacementSolution":
        return PlacementSolution(self.placements, self.serving, self.routes, value)

    def serving_host(self, u: int, a: int) -> int:
        hosts = self.serving.get((u, a), frozenset())
        if len(hosts) != 1:
            raise ValueError(f"uav {u} at access {a} has {len(hosts)} serving hosts")
        return next(iter(hosts))

    def route_nodes(self, u: int, a: int) -> tuple[int, ...]:
        h = self.serving_host(u, a)
        edges = self.routes.get((u, h, a), ())
        nxt = dict(edges)
        nodes = [h]
        while nodes[-1] in nxt and len(nodes) <= len(edges):
            nodes.append(nxt[nodes[-1]])
        return tuple(nodes)

    def assignment_vector(self, order: Iterable[tuple[int, int]]) -> tuple[int, ...]:
        return tuple(self.serving_host(u, a) for u, a in order)


def _scenario_of(problem: PlacementProblem | Scenario) -> Scenario:
    return problem.scenario if isinstance(problem, PlacementProblem) else problem


def objective_cost(problem: PlacementProblem | Scenario, solution: PlacementSolution) -> int:
    """Total deployment cost: dwell periods x resource demand x host unit cost, per serving assignment."""
    sc = _scenario_of(problem)
    total = 0
    for (u, a), hosts in solution.serving.items():
        d = sc.uav(u).resource_demand * dwell_periods(sc.schedule, u, a)
        for h in hosts:
            total += d * sc.graph.host(h).unit_cost
    return total


def objective_cost_literal(problem: PlacementProblem | Scenario, solution: PlacementSolution) -> int:
    """The objective as the plain quadruple sum over hosts, periods, uavs and stops."""
    sc = _scenario_of(problem)
    total = 0
    for h in sc.graph.host_nodes:
        c = sc.graph.host(h).unit_cost
        for t in sc.horizon:
            for d, p in zip(sc.uavs, sc.plans):
                for a in p.stops:
                    k = int(h in solution.serving.get((d.uav_id, a), ()))
                    total += k * sc.schedule.z(d.uav_id, a, t) * d.resource_demand * c
    return total


@dataclass(frozen=True)
class Violation:
    constraint: str
    where: str
    measured: float | int | str = ""
    bound: float | int | str = ""

    def __str__(self) -> str:
        detail = f": measured {self.measured} vs bound {self.bound}" if self.measured != "" else ""
        return f"{self.constraint} [{self.where}]{detail}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, *args) -> None:
        self.violations.append(Violation(*args))

    @property
    def ids(self) -> set[str]:
        return {v.constraint for v in self.violations}

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def render(self) -> str:
        if not self.violations:
            return "feasible: no violations"
        return "\n".join(str(v) for v in self.violations)


def check_solution(problem: PlacementProblem | Scenario, solution: PlacementSolution) -> ViolationReport:
    """Check every model constraint directly from the raw variables.

    Nothing here trusts how the solution was produced: reliability uses the
    direct product of link survivals rather than the log form used during
    path generation.
    """
    sc = _scenario_of(problem)
    graph = sc.graph
    report = ViolationReport()
    demands = {d.uav_id: d for d in sc.uavs}
    stops = {p.uav_id: p.stops for p in sc.plans}
    hosts = set(graph.host_nodes)

    # -- references
    for u, hs in solution.placements.items():
        if u not in demands:
            report.add("structure", f"u={u}", "unknown uav")
        for h in hs - hosts:
            report.add("structure", f"u={u} h={h}", "not a host")
    for (u, a), hs in solution.serving.items():
        if u not in demands or a not in stops[u]:
            report.add("structure", f"u={u} a={a}", "access not on trajectory")
        for h in hs - hosts:
            report.add("structure", f"u={u} a={a} h={h}", "not a host")
    routes = {}
    for (u, h, a), edges in solution.routes.items():
        if u not in demands or a not in stops[u] or h not in hosts:
            report.add("structure", f"u={u} h={h} a={a}", "route key out of range")
            continue
        bad = [e for e in edges if not graph.has_link(*e)]
        if bad:
            report.add("structure", f"u={u} h={h} a={a}", f"edges {bad} are not links")
            continue
        if len(set(edges)) != len(edges):
            report.add("structure", f"u={u} h={h} a={a}", "repeated link use")
            continue
        routes[(u, h, a)] = tuple(edges)

    def serving(u, a):
        return solution.serving.get((u, a), frozenset()) & hosts

    # -- placement (C1-C4)
    for u in demands:
        placed = solution.placements.get(u, frozenset()) & hosts
        if len(placed) < 1:
            report.add("C1", f"u={u}", len(placed), ">= 1")
        used = set()
        for a in stops[u]:
            ks = serving(u, a)
            used |= ks
            for h in sorted(ks - placed):
                report.add("C2", f"u={u} h={h} a={a}", "K=1", "X=0")
            if len(ks) != 1:
                report.add("C4", f"u={u} a={a}", len(ks), "== 1")
        for h in sorted(placed - used):
            report.add("C3", f"u={u} h={h}", "X=1", "serves no access point")

    # -- host capacity (C5)
    load: dict[tuple[int, int], int] = Counter()
    for u, d in demands.items():
        for a in stops[u]:
            for h in serving(u, a):
                for t in sc.schedule.periods_at(u, a):
                    load[(h, t)] += d.resource_demand
    for (h, t), used in sorted(load.items()):
        cap = graph.host(h).capacity
        if used > cap:
            report.add("C5", f"h={h} t={t}", used, cap)

    # -- link bandwidth (C6), both directions share one capacity
    traffic: dict[tuple[tuple[int, int], int], int] = Counter()
    for (u, h, a), edges in routes.items():
        for t in sc.schedule.periods_at(u, a):
            for i, j in edges:
                traffic[((min(i, j), max(i, j)), t)] += demands[u].bandwidth_demand
    for (key, t), used in sorted(traffic.items()):
        bw = graph.link(*key).bandwidth
        if used > bw:
            report.add("C6", f"link={key[0]}-{key[1]} t={t}", used, bw)

    # -- routing (C7-C11, simple path), latency (C12), reliability (C18)
    triples = set(routes)
    for (u, a), hs in solution.serving.items():
        if u in demands and a in stops[u]:
            triples |= {(u, h, a) for h in hs & hosts}
    for u, h, a in sorted(triples):
        edges = routes.get((u, h, a), ())
        k = int(h in serving(u, a))
        where = f"u={u} h={h} a={a}"
        flow_ok = True
        if edges and not k:
            report.add("C7", where, "Y=1", "K=0")
            flow_ok = False
        out_deg = Counter(i for i, _ in edges)
        in_deg = Counter(j for _, j in edges)
        if out_deg[h] != k:
            report.add("C8", where, out_deg[h], k)
            flow_ok = False
        if in_deg[a] != k:
            report.add("C9", where, in_deg[a], k)
            flow_ok = False
        if out_deg[a] != 0:
            report.add("C10", where, out_deg[a], 0)
            flow_ok = False
        unbalanced = sorted(i for i in set(out_deg) | set(in_deg)
                            if i not in (h, a) and out_deg[i] != in_deg[i])
        if unbalanced:
            report.add("C11", where, f"unbalanced nodes {unbalanced}", "in == out")
            flow_ok = False
        if flow_ok and k and not _is_simple_path(edges, h, a):
            report.add("simple-path", where, "route contains a cycle", "single simple path")

        d = demands[u]
        latency = math.fsum(graph.link(i, j).latency for i, j in edges)
        if latency > d.latency_tolerance + LATENCY_EPS:
            report.add("C12", where, latency, d.latency_tolerance)
        survival = 1.0
        for i, j in edges:
            survival *= 1.0 - graph.link(i, j).failure_prob
        if survival < d.reliability_demand - RELIABILITY_EPS:
            report.add("C18", where, survival, d.reliability_demand)
    return report


def _is_simple_path(edges: tuple[tuple[int, int], ...], h: int, a: int) -> bool:
    nxt: dict[int, int] = {}
    for i, j in edges:
        if i in nxt:
            return False
        nxt[i] = j
    seen = {h}
    v = h
    steps = 0
    while v != a:
        if v not in nxt:
            return False
        v = nxt[v]
        if v in seen:
            return False
        seen.add(v)
        steps += 1
    return steps == len(edges)


def solution_json(problem: PlacementProblem | Scenario, solution: PlacementSolution | None,
                  status: str, wall_time_s: float, nodes_explored: int,
                  witness: tuple[int, int] | None = None) -> dict:
    sc = _scenario_of(problem)
    out: dict = {"status": status, "wall_time_s": wall_time_s, "nodes_explored": nodes_explored}
    if witness is not None:
        out["witness"] = {"uav": witness[0], "access": witness[1]}
    if solution is None:
        out["objective"] = None
        out["uavs"] = []
        return out
    out["objective"] = solution.objective_value
    uavs = []
    for p in sc.plans:
        u = p.uav_id
        stops = []
        for a in p.stops:
            h = solution.serving_host(u, a)
            stops.append({"access": a, "serving_host": h, "route": list(solution.route_nodes(u, a))})
        uavs.append({"uav": u, "placements": sorted(solution.placements.get(u, ())), "stops": stops})
    out["uavs"] = uavs
    return out


def solution_from_json(problem: PlacementProblem | Scenario, data: dict) -> PlacementSolution | None:
    """Rebuild the sparse variables from a solution document (routes given as node sequences)."""
    if data.get("objective") is None and not data.get("uavs"):
        return None
    placements: dict[int, frozenset[int]] = {}
    serving = {}
    routes = {}
    for entry in data["uavs"]:
        u = int(entry["uav"])
        placements[u] = frozenset(int(h) for h in entry["placements"])
        for stop in entry["stops"]:
            a, h = int(stop["access"]), int(stop["serving_host"])
            serving[(u, a)] = frozenset({h})
            nodes = [int(n) for n in stop["route"]]
            routes[(u, h, a)] = tuple(zip(nodes, nodes[1:]))
    sol = PlacementSolution(placements, serving, routes)
    objective = data.get("objective")
    return sol.with_objective(int(objective) if objective is not None else objective_cost(problem, sol))

