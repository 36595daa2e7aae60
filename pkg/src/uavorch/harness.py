"""Seeded experiment sweeps mirroring the four evaluation plots, written as CSV tables."""

from __future__ import annotations

import csv
import io
import logging
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .jsonio import format_float
from .model import assemble_problem, check_solution
from .scenario import PROFILES, ScenarioParams, generate_scenario
from .solver import SolveStatus, SolverOptions, solve_exact
from .topology import NetworkGraph, NodeKind

log = logging.getLogger(__name__)

SUITES = ("cost_vs_uavs", "runtime_vs_uavs", "replicates_vs_mission_length", "tier_vs_qos")
TIERS = ("edge_bs", "edge_agg", "cloud")
TIER_RANK = {t: r for r, t in enumerate(TIERS)}

INSTANCE_HEADER = ["suite", "sweep_value", "seed", "status", "uavs", "objective",
                   "wall_time_s", "nodes_explored", "mean_replicates"]
STOP_HEADER = ["suite", "sweep_value", "seed", "status", "uav", "access", "latency_ms",
               "reliability", "tier", "route_latency_ms"]
SUMMARY_HEADER = ["suite", "sweep_value", "metric", "n", "mean", "stddev"]

UAV_SWEEPS = {"desk": (2, 4, 6, 8), "table1": (5, 10, 15, 20, 25)}
MISSION_SWEEP = (1, 3, 5, 8)


class ExperimentError(RuntimeError):
    """A solver result failed validation; this is a bug, not an experimental outcome."""


def classify_host_tier(graph: NetworkGraph, h: int) -> str:
    kind = graph.kind(h)
    if kind is NodeKind.EDGE_BS:
        return "edge_bs"
    if kind is NodeKind.EDGE_AGG:
        return "edge_agg"
    if kind is NodeKind.CLOUD:
        return "cloud"
    raise ValueError(f"node {h} is a {kind.value} node, not a host")


def replicate_count(solution, u: int) -> int:
    """Number of distinct hosts running an instance of uav ``u``'s VNF."""
    if u not in solution.placements:
        raise KeyError(f"unknown uav {u}")
    return len(solution.placements[u])


@dataclass(frozen=True)
class StopRecord:
    uav: int
    access: int
    latency_ms: float
    reliability: float
    tier: str
    route_latency_ms: float


@dataclass(frozen=True)
class MetricsRow:
    suite: str
    seed: int
    sweep_value: int
    status: str
    uavs: int
    objective: int | None
    wall_time_s: float
    nodes_explored: int
    mean_replicates: float | None
    stops: tuple[StopRecord, ...] = ()


@dataclass(frozen=True)
class SummaryRow:
    suite: str
    sweep_value: int
    metric: str
    n: int
    mean: float | None
    stddev: float | None


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    seeds: tuple[int, ...]
    profile: str = "desk"
    sweep: tuple[int, ...] | None = None
    overrides: Mapping[str, Any] = field(default_factory=dict)
    solver: SolverOptions = field(default_factory=SolverOptions)
    record_timing: bool = True

    def __post_init__(self) -> None:
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.sweep is not None and not self.sweep:
            raise ValueError("sweep values must be non-empty")

    @property
    def sweep_values(self) -> tuple[int, ...]:
        if self.sweep is not None:
            return tuple(self.sweep)
        if self.suite in ("cost_vs_uavs", "runtime_vs_uavs"):
            return UAV_SWEEPS[self.profile]
        if self.suite == "replicates_vs_mission_length":
            return MISSION_SWEEP
        return (self.base_params().uavs,)

    def base_params(self) -> ScenarioParams:
        return PROFILES[self.profile](**dict(self.overrides))

    def params_for(self, value: int, seed: int) -> ScenarioParams:
        params = self.base_params().replace(seed=seed)
        if self.suite == "replicates_vs_mission_length":
            return params.replace(mission_length=(value, value))
        return params.replace(uavs=value)


def run_instance(config: ExperimentConfig, value: int, seed: int) -> MetricsRow:
    scenario = generate_scenario(config.params_for(value, seed))
    problem = assemble_problem(scenario, config.solver.k_paths, strict=False)
    outcome = solve_exact(problem, config.solver)
    wall = outcome.wall_time_s if config.record_timing else 0.0
    solution = outcome.solution
    if solution is None:
        return MetricsRow(config.suite, seed, value, outcome.status.value, len(scenario.uavs),
                          None, wall, outcome.nodes_explored, None)

    report = check_solution(problem, solution)
    if report:
        raise ExperimentError(
            f"{config.suite} seed={seed} sweep={value}: solver returned an invalid "
            f"solution:\n{report.render()}")

    graph = scenario.graph
    replicates = [replicate_count(solution, d.uav_id) for d in scenario.uavs]
    stops = []
    for d, plan in zip(scenario.uavs, scenario.plans):
        for a in plan.stops:
            h = solution.serving_host(d.uav_id, a)
            route = solution.routes[(d.uav_id, h, a)]
            stops.append(StopRecord(
                d.uav_id, a, d.latency_tolerance, d.reliability_demand,
                classify_host_tier(graph, h),
                sum(graph.link(i, j).latency for i, j in route)))
    mean_rep = statistics.fmean(replicates) if replicates else None
    return MetricsRow(config.suite, seed, value, outcome.status.value, len(scenario.uavs),
                      solution.objective_value, wall, outcome.nodes_explored, mean_rep, tuple(stops))


def run_experiment(config: ExperimentConfig) -> list[MetricsRow]:
    rows = []
    for value in config.sweep_values:
        for seed in sorted(config.seeds):
            row = run_instance(config, value, seed)
            log.info("%s sweep=%s seed=%s status=%s objective=%s", config.suite, value,
                     seed, row.status, row.objective)
            rows.append(row)
    return rows


def paired_seeds(rows: list[MetricsRow]) -> list[int]:
    """Seeds solved to proven optimality at every sweep value."""
    by_seed: dict[int, set[int]] = {}
    values = {r.sweep_value for r in rows}
    for r in rows:
        if r.status == SolveStatus.OPTIMAL.value:
            by_seed.setdefault(r.seed, set()).add(r.sweep_value)
    return sorted(s for s, vs in by_seed.items() if vs == values)


def summarize(rows: list[MetricsRow]) -> list[SummaryRow]:
    """Mean and sample standard deviation per sweep value over the paired seeds."""
    seeds = set(paired_seeds(rows))
    out = []
    for suite in sorted({r.suite for r in rows}):
        suite_rows = [r for r in rows if r.suite == suite and r.seed in seeds]
        for value in sorted({r.sweep_value for r in rows if r.suite == suite}):
            cell = [r for r in suite_rows if r.sweep_value == value]
            metrics: dict[str, list[float]] = {
                "objective": [r.objective for r in cell],
                "wall_time_s": [r.wall_time_s for r in cell],
                "nodes_explored": [r.nodes_explored for r in cell],
                "mean_replicates": [r.mean_replicates for r in cell],
            }
            if suite == "tier_vs_qos":
                tiers = [s.tier for r in cell for s in r.stops]
                for t in TIERS:
                    metrics[f"share_{t}"] = [float(x == t) for x in tiers]
            for name, values in metrics.items():
                out.append(_aggregate(suite, value, name, values))
    return out


def _aggregate(suite: str, value: int, metric: str, values: list[float]) -> SummaryRow:
    if not values:
        return SummaryRow(suite, value, metric, 0, None, None)
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return SummaryRow(suite, value, metric, len(values), mean, std)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _csv_text(header: list[str], records: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_cell(v) for v in rec])
    return buf.getvalue()


def suite_csv(rows: list[MetricsRow]) -> str:
    rows = sorted(rows, key=lambda r: (r.suite, r.sweep_value, r.seed))
    if rows and rows[0].suite == "tier_vs_qos":
        records = [[r.suite, r.sweep_value, r.seed, r.status, s.uav, s.access, s.latency_ms,
                    s.reliability, s.tier, s.route_latency_ms]
                   for r in rows for s in r.stops]
        return _csv_text(STOP_HEADER, records)
    records = [[r.suite, r.sweep_value, r.seed, r.status, r.uavs, r.objective,
                float(r.wall_time_s), r.nodes_explored, r.mean_replicates] for r in rows]
    return _csv_text(INSTANCE_HEADER, records)


def summary_csv(summary: list[SummaryRow]) -> str:
    records = [[s.suite, s.sweep_value, s.metric, s.n, s.mean, s.stddev] for s in summary]
    return _csv_text(SUMMARY_HEADER, records)


def write_outputs(rows: list[MetricsRow], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for suite in sorted({r.suite for r in rows}):
        path = out / f"{suite}.csv"
        path.write_text(suite_csv([r for r in rows if r.suite == suite]))
        written.append(path)
    path = out / "summary.csv"
    path.write_text(summary_csv(summarize(rows)))
    written.append(path)
    return written
