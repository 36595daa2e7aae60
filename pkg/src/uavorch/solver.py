"""Exact placement search and an exhaustive oracle for tiny instances.

The objective depends only on which host serves each (uav, access) pair, while
the path choice only matters for bandwidth. The branch-and-bound therefore
branches pair by pair over (host, candidate path) options, tracks residual
host capacity and link bandwidth per period, and bounds with the cheapest
QoS-feasible host of every unassigned pair.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from .model import (PlacementProblem, PlacementSolution, bare_problem,
                    check_solution)
from .paths import LATENCY_EPS, RELIABILITY_EPS, CandidatePath
from .scenario import Scenario
from .topology import NodeKind


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIME_LIMIT = "time_limit_incumbent"


@dataclass(frozen=True)
class SolverOptions:
    time_limit: float = 60.0
    k_paths: int | None = 8
    mode: str = "branch_and_bound"

    def __post_init__(self) -> None:
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.mode not in ("branch_and_bound", "brute_force"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k_paths is not None and self.k_paths < 1:
            raise ValueError("k_paths must be positive or None")


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    solution: PlacementSolution | None
    nodes_explored: int
    wall_time_s: float
    order: tuple[tuple[int, int], ...] = ()
    vector: tuple[tuple[int, int], ...] = ()
    witness: tuple[int, int] | None = None
    reason: str = ""

    @property
    def objective(self) -> int | None:
        return None if self.solution is None else self.solution.objective_value


def branch_order(problem: PlacementProblem) -> list[tuple[int, int]]:
    """Pairs by decreasing demand x dwell, then uav id, then trajectory position."""
    sc = problem.scenario
    position = {}
    for p in sc.plans:
        for idx, a in enumerate(p.stops):
            position[(p.uav_id, a)] = idx
    return sorted(problem.pairs, key=lambda ua: (
        -sc.uav(ua[0]).resource_demand * problem.dwell(*ua), ua[0], position[ua]))


def _min_pair_cost(problem: PlacementProblem, u: int, a: int) -> int:
    options = problem.candidates.get((u, a), ())
    if not options:
        return math.inf
    return min(problem.pair_cost(u, a, h) for h, _ in options)


def lower_bound(problem: PlacementProblem,
                partial: Mapping[tuple[int, int], object] | None = None) -> int:
    """Cheapest QoS-feasible host cost summed over the pairs not in ``partial``.

    Capacity and bandwidth are ignored, so this never exceeds the cost of any
    feasible completion.
    """
    partial = partial or {}
    return sum(_min_pair_cost(problem, u, a) for u, a in problem.pairs if (u, a) not in partial)


def _check_consistency(problem: PlacementProblem) -> None:
    graph = problem.graph
    for u, a in problem.pairs:
        if not (0 <= a < graph.num_nodes) or graph.kinds[a] is not NodeKind.ACCESS:
            raise ValueError(f"uav {u} is scheduled at {a}, which is not an access node")
    for (u, a), options in problem.candidates.items():
        for h, paths in options:
            if not graph.is_host(h):
                raise ValueError(f"candidate host {h} for uav {u} is not a host")


@dataclass
class _Option:
    cost: int
    host: int
    index: int
    path: CandidatePath
    links: tuple[int, ...]


def solve_exact(problem: PlacementProblem, opts: SolverOptions | None = None) -> SolveOutcome:
    opts = opts or SolverOptions()
    start = time.perf_counter()
    _check_consistency(problem)
    order = branch_order(problem)
    if problem.witnesses:
        return SolveOutcome(SolveStatus.INFEASIBLE, None, 0, time.perf_counter() - start,
                            tuple(order), witness=problem.witnesses[0],
                            reason="no QoS-feasible host for this (uav, access) pair")
    for ua in order:
        if not problem.candidates.get(ua):
            return SolveOutcome(SolveStatus.INFEASIBLE, None, 0, time.perf_counter() - start,
                                tuple(order), witness=ua,
                                reason="no QoS-feasible host for this (uav, access) pair")

    sc = problem.scenario
    graph = sc.graph
    n = len(order)
    periods = [sc.schedule.periods_at(u, a) for u, a in order]
    demand = [sc.uav(u).resource_demand for u, _ in order]
    bandwidth = [sc.uav(u).bandwidth_demand for u, _ in order]
    options: list[list[_Option]] = []
    for u, a in order:
        opts_ua = []
        for h, paths in problem.candidates[(u, a)]:
            cost = problem.pair_cost(u, a, h)
            for idx, path in enumerate(paths):
                links = tuple(graph.link_position(i, j) for i, j in path.edges)
                opts_ua.append(_Option(cost, h, idx, path, links))
        opts_ua.sort(key=lambda o: (o.cost, o.host, o.index))
        options.append(opts_ua)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + options[i][0].cost

    T = sc.horizon.periods
    cap_left = {h: [graph.host(h).capacity] * (T + 1) for h in graph.host_nodes}
    bw_left = [[link.bandwidth] * (T + 1) for link in graph.links]

    best_cost = math.inf
    best_vec: tuple | None = None
    best_choice: list[_Option] | None = None
    vec: list[tuple[int, int]] = []
    chosen: list[_Option] = []
    explored = 0
    timed_out = False
    deadline = start + opts.time_limit

    def fits(i: int, o: _Option) -> bool:
        row = cap_left[o.host]
        d = demand[i]
        for t in periods[i]:
            if row[t] < d:
                return False
        b = bandwidth[i]
        for pos in o.links:
            brow = bw_left[pos]
            for t in periods[i]:
                if brow[t] < b:
                    return False
        return True

    def apply(i: int, o: _Option, sign: int) -> None:
        row = cap_left[o.host]
        for t in periods[i]:
            row[t] -= sign * demand[i]
        for pos in o.links:
            brow = bw_left[pos]
            for t in periods[i]:
                brow[t] -= sign * bandwidth[i]

    def hopeless(bound: float, prefix: list[tuple[int, int]]) -> bool:
        if bound > best_cost:
            return True
        if bound == best_cost:
            # an equal-cost completion only helps if it can be lexicographically smaller
            return tuple(prefix) > best_vec[:len(prefix)]
        return False

    def dfs(i: int, cost: int) -> None:
        nonlocal best_cost, best_vec, best_choice, explored, timed_out
        if i == n:
            key = tuple(vec)
            if cost < best_cost or (cost == best_cost and key < best_vec):
                best_cost, best_vec, best_choice = cost, key, list(chosen)
            return
        for o in options[i]:
            if timed_out:
                return
            new_cost = cost + o.cost
            vec.append((o.host, o.index))
            if hopeless(new_cost + suffix[i + 1], vec) or not fits(i, o):
                vec.pop()
                continue
            explored += 1
            if time.perf_counter() > deadline:
                timed_out = True
                vec.pop()
                return
            apply(i, o, +1)
            chosen.append(o)
            dfs(i + 1, new_cost)
            chosen.pop()
            apply(i, o, -1)
            vec.pop()

    dfs(0, 0)
    elapsed = time.perf_counter() - start

    if best_choice is None:
        if timed_out:
            return SolveOutcome(SolveStatus.TIME_LIMIT, None, explored, elapsed, tuple(order),
                                reason="time limit reached before any feasible assignment")
        return SolveOutcome(SolveStatus.INFEASIBLE, None, explored, elapsed, tuple(order),
                            reason="search exhausted: host capacity or link bandwidth cannot "
                                   "accommodate every (uav, access) pair simultaneously")
    assignment = {ua: o.path for ua, o in zip(order, best_choice)}
    solution = PlacementSolution.from_assignment(problem, assignment)
    status = SolveStatus.TIME_LIMIT if timed_out else SolveStatus.OPTIMAL
    return SolveOutcome(status, solution, explored, elapsed, tuple(order), best_vec)


def _oracle_paths(scenario: Scenario, host: int, access: int,
                  latency: float, reliability: float) -> list[CandidatePath]:
    """Every QoS-feasible simple path, enumerated by networkx and tested in product form."""
    graph = scenario.graph
    g = graph.to_networkx()
    g.remove_nodes_from([h for h in graph.host_nodes if h != host])
    if host not in g or access not in g:
        return []
    out = []
    for nodes in nx.all_simple_paths(g, host, access):
        path = CandidatePath.from_nodes(graph, nodes)
        survival = 1.0
        for p in path.failure_probs:
            survival *= 1.0 - p
        if path.total_latency <= latency + LATENCY_EPS and survival >= reliability - RELIABILITY_EPS:
            out.append(path)
    return sorted(out, key=lambda p: p.order_key)


def solve_bruteforce(problem: PlacementProblem | Scenario, max_pairs: int = 8, max_hosts: int = 5,
                     max_assignments: int = 2_000_000) -> SolveOutcome:
    """Try every (host, simple path) combination; keep the cheapest one that validates.

    Only assignments whose cost could still improve on (or tie-break against)
    the incumbent are passed to :func:`check_solution`; skipping the rest
    cannot change the result.
    """
    start = time.perf_counter()
    if isinstance(problem, Scenario):
        problem = bare_problem(problem)
    sc = problem.scenario
    graph = sc.graph
    if len(problem.pairs) > max_pairs or len(graph.host_nodes) > max_hosts:
        raise ValueError(
            f"instance too large for brute force: {len(problem.pairs)} pairs "
            f"(max {max_pairs}), {len(graph.host_nodes)} hosts (max {max_hosts})")
    order = branch_order(problem)

    choices = []
    for u, a in order:
        demand = sc.uav(u)
        opts = []
        for h in graph.host_nodes:
            paths = _oracle_paths(sc, h, a, demand.latency_tolerance, demand.reliability_demand)
            cost = problem.pair_cost(u, a, h)
            opts.extend((cost, h, idx, path) for idx, path in enumerate(paths))
        if not opts:
            return SolveOutcome(SolveStatus.INFEASIBLE, None, 0, time.perf_counter() - start,
                                tuple(order), witness=(u, a),
                                reason="no QoS-feasible host for this (uav, access) pair")
        choices.append(opts)
    total = math.prod(len(c) for c in choices)
    if total > max_assignments:
        raise ValueError(f"{total} assignments exceed the brute-force limit of {max_assignments}")

    best_cost = math.inf
    best_vec = None
    best_solution = None
    examined = 0
    for combo in itertools.product(*choices):
        examined += 1
        cost = sum(c[0] for c in combo)
        if cost > best_cost:
            continue
        key = tuple((c[1], c[2]) for c in combo)
        if cost == best_cost and key >= best_vec:
            continue
        solution = PlacementSolution.from_assignment(problem, {ua: c[3] for ua, c in zip(order, combo)})
        if check_solution(problem, solution):
            continue
        best_cost, best_vec, best_solution = cost, key, solution
    elapsed = time.perf_counter() - start
    if best_solution is None:
        return SolveOutcome(SolveStatus.INFEASIBLE, None, examined, elapsed, tuple(order),
                            reason="no assignment satisfies every constraint")
    return SolveOutcome(SolveStatus.OPTIMAL, best_solution, examined, elapsed, tuple(order), best_vec)


def solve(problem: PlacementProblem, opts: SolverOptions | None = None) -> SolveOutcome:
    opts = opts or SolverOptions()
    if opts.mode == "brute_force":
        return solve_bruteforce(problem)
    return solve_exact(problem, opts)
