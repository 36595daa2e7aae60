"""Text LP export of the full edge-variable model, plus a reader and an evaluator.

The exported model routes on raw link variables Y rather than on the
candidate-path pool, so it is the complete formulation and can be handed to
any MILP solver for cross-checking.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field

from .jsonio import format_float, round_sig
from .model import PlacementProblem, PlacementSolution, _scenario_of
from .scenario import Scenario

Term = tuple[float, str]

SECTION_RE = re.compile(r"^(minimize|subject to|binary|binaries|end)\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class LpRow:
    name: str
    terms: tuple[Term, ...]
    sense: str
    rhs: float


@dataclass
class LpModel:
    objective: tuple[Term, ...] = ()
    rows: list[LpRow] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LpModel):
            return NotImplemented
        return (self.objective == other.objective and self.rows == other.rows
                and self.binaries == other.binaries)


def x_var(u: int, h: int) -> str:
    return f"X_{u}_{h}"


def k_var(u: int, h: int, a: int) -> str:
    return f"K_{u}_{h}_{a}"


def y_var(u: int, h: int, a: int, i: int, j: int) -> str:
    return f"Y_{u}_{h}_{a}_{i}_{j}"


def build_lp(problem: PlacementProblem | Scenario) -> LpModel:
    sc = _scenario_of(problem)
    graph = sc.graph
    hosts = graph.host_nodes
    arcs = graph.directed_edges()
    plans = [(d, p.stops) for d, p in zip(sc.uavs, sc.plans)]
    sched = sc.schedule

    rows: list[tuple[tuple[Term, ...], str, float]] = []

    def row(terms, sense, rhs):
        rows.append((tuple((round_sig(c), v) for c, v in terms), sense, round_sig(rhs)))

    objective = []
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                coef = len(sched.periods_at(u, a)) * d.resource_demand * graph.host(h).unit_cost
                objective.append((float(coef), k_var(u, h, a)))

    # C1: at least one instance
    for d, stops in plans:
        row([(1, x_var(d.uav_id, h)) for h in hosts], ">=", 1)
    # C2: K <= X
    for d, stops in plans:
        for h in hosts:
            for a in stops:
                row([(1, k_var(d.uav_id, h, a)), (-1, x_var(d.uav_id, h))], "<=", 0)
    # C3: X <= sum_a K
    for d, stops in plans:
        for h in hosts:
            row([(1, x_var(d.uav_id, h))] + [(-1, k_var(d.uav_id, h, a)) for a in stops], "<=", 0)
    # C4: one serving instance per access point
    for d, stops in plans:
        for a in stops:
            row([(1, k_var(d.uav_id, h, a)) for h in hosts], "=", 1)
    # C5: host capacity per period
    for h in hosts:
        for t in sc.horizon:
            terms = [(d.resource_demand, k_var(d.uav_id, h, a))
                     for d, stops in plans for a in stops if sched.z(d.uav_id, a, t)]
            if terms:
                row(terms, "<=", graph.host(h).capacity)
    # C6: link bandwidth per period, both directions sharing the capacity
    for link in graph.links:
        for t in sc.horizon:
            terms = []
            for d, stops in plans:
                for a in stops:
                    if not sched.z(d.uav_id, a, t):
                        continue
                    for h in hosts:
                        terms.append((d.bandwidth_demand, y_var(d.uav_id, h, a, link.u, link.v)))
                        terms.append((d.bandwidth_demand, y_var(d.uav_id, h, a, link.v, link.u)))
            if terms:
                row(terms, "<=", link.bandwidth)
    # C7: Y <= K
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                for i, j in arcs:
                    row([(1, y_var(u, h, a, i, j)), (-1, k_var(u, h, a))], "<=", 0)
    # C8: one arc leaves the host
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                row([(1, y_var(u, h, a, h, j)) for j in sorted(graph.neighbors(h))]
                    + [(-1, k_var(u, h, a))], "=", 0)
    # C9: one arc enters the access point
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                row([(1, y_var(u, h, a, i, a)) for i in sorted(graph.neighbors(a))]
                    + [(-1, k_var(u, h, a))], "=", 0)
    # C10: nothing leaves the access point
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                row([(1, y_var(u, h, a, a, j)) for j in sorted(graph.neighbors(a))], "=", 0)
    # C11: flow conservation elsewhere
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                for i in range(graph.num_nodes):
                    if i in (h, a) or not graph.neighbors(i):
                        continue
                    nb = sorted(graph.neighbors(i))
                    row([(1, y_var(u, h, a, i, j)) for j in nb]
                        + [(-1, y_var(u, h, a, j, i)) for j in nb], "=", 0)
    # C12: path latency
    for d, stops in plans:
        u = d.uav_id
        for h in hosts:
            for a in stops:
                row([(graph.link(i, j).latency, y_var(u, h, a, i, j)) for i, j in arcs],
                    "<=", d.latency_tolerance)
    # C18: linearized reliability, sum of log survivals
    for d, stops in plans:
        u = d.uav_id
        log_p = math.log(d.reliability_demand)
        for h in hosts:
            for a in stops:
                row([(math.log1p(-graph.link(i, j).failure_prob), y_var(u, h, a, i, j))
                     for i, j in arcs], ">=", log_p)

    binaries = []
    for d, stops in plans:
        u = d.uav_id
        binaries += [x_var(u, h) for h in hosts]
        binaries += [k_var(u, h, a) for h in hosts for a in stops]
        binaries += [y_var(u, h, a, i, j) for h in hosts for a in stops for i, j in arcs]

    model = LpModel(
        objective=tuple((round_sig(c), v) for c, v in objective),
        rows=[LpRow(f"c{n}", terms, sense, rhs) for n, (terms, sense, rhs) in enumerate(rows, start=1)],
        binaries=binaries,
    )
    return model


TERMS_PER_LINE = 16


def _format_terms(terms: tuple[Term, ...]) -> list[str]:
    chunks = [f"{'+' if c >= 0 else '-'}{format_float(abs(c))} {v}" for c, v in terms]
    return [" ".join(chunks[i:i + TERMS_PER_LINE]) for i in range(0, len(chunks), TERMS_PER_LINE)] or ["0"]


def write_lp(model: LpModel) -> str:
    out = ["\\ UAV VNF placement model", "Minimize"]
    lines = _format_terms(model.objective)
    out.append(f" obj: {lines[0]}")
    out += [f"   {line}" for line in lines[1:]]
    out.append("Subject To")
    for r in model.rows:
        lines = _format_terms(r.terms)
        if len(lines) == 1:
            out.append(f" {r.name}: {lines[0]} {r.sense} {format_float(r.rhs)}")
        else:
            out.append(f" {r.name}: {lines[0]}")
            out += [f"   {line}" for line in lines[1:-1]]
            out.append(f"   {lines[-1]} {r.sense} {format_float(r.rhs)}")
    out.append("Binary")
    out += [f" {v}" for v in model.binaries]
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(problem: PlacementProblem | Scenario) -> str:
    return write_lp(build_lp(problem))


class LpParseError(ValueError):
    pass


def _parse_terms(tokens: list[str]) -> tuple[Term, ...]:
    if tokens == ["0"]:
        return ()
    if len(tokens) % 2:
        raise LpParseError(f"dangling token in expression: {tokens[-1]!r}")
    terms = []
    for coef, var in zip(tokens[::2], tokens[1::2]):
        if coef[0] not in "+-":
            raise LpParseError(f"coefficient without explicit sign: {coef!r}")
        terms.append((float(coef), var))
    return tuple(terms)


def read_lp(text: str) -> LpModel:
    sections: dict[str, list[str]] = defaultdict(list)
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        m = SECTION_RE.match(line)
        if m:
            current = m.group(1).lower()
            if current == "binaries":
                current = "binary"
            continue
        if current is None:
            raise LpParseError(f"content before any section: {line!r}")
        sections[current].extend(line.split())

    model = LpModel()
    obj = sections.get("minimize", [])
    if obj:
        if not obj[0].endswith(":"):
            raise LpParseError("objective must be named")
        model.objective = _parse_terms(obj[1:])

    tokens = sections.get("subject to", [])
    pos = 0
    while pos < len(tokens):
        name = tokens[pos]
        if not name.endswith(":"):
            raise LpParseError(f"expected constraint name, got {name!r}")
        end = pos + 1
        while end < len(tokens) and tokens[end] not in ("<=", ">=", "="):
            end += 1
        if end + 1 >= len(tokens):
            raise LpParseError(f"constraint {name} has no sense/rhs")
        model.rows.append(LpRow(name[:-1], _parse_terms(tokens[pos + 1:end]),
                                tokens[end], float(tokens[end + 1])))
        pos = end + 2
    model.binaries = list(sections.get("binary", []))
    return model


def solution_values(problem: PlacementProblem | Scenario, solution: PlacementSolution) -> dict[str, int]:
    """Variable name -> 1 for every variable set in ``solution`` (others are 0)."""
    values: dict[str, int] = {}
    for u, hs in solution.placements.items():
        for h in hs:
            values[x_var(u, h)] = 1
    for (u, a), hs in solution.serving.items():
        for h in hs:
            values[k_var(u, h, a)] = 1
    for (u, h, a), edges in solution.routes.items():
        for i, j in edges:
            values[y_var(u, h, a, i, j)] = 1
    return values


def evaluate_lp(model: LpModel, values: dict[str, float], tol: float = 1e-9) -> tuple[float, list[str]]:
    """Objective value and the names of rows violated by ``values`` (missing variables are 0)."""
    def lhs(terms):
        return math.fsum(c * values.get(v, 0) for c, v in terms)

    violated = []
    for r in model.rows:
        x = lhs(r.terms)
        scale = tol * max(1.0, abs(r.rhs))
        ok = (x <= r.rhs + scale if r.sense == "<=" else
              x >= r.rhs - scale if r.sense == ">=" else abs(x - r.rhs) <= scale)
        if not ok:
            violated.append(r.name)
    return lhs(model.objective), violated
