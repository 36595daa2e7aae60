"""UAV demands, flight plans, and the per-period attachment constants they imply."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .topology import NetworkGraph, NodeKind


class FleetError(ValueError):
    pass


@dataclass(frozen=True)
class UavDemand:
    """One VNF's requirements. A UAV running several VNFs appears once per VNF."""

    uav_id: int
    resource_demand: int
    bandwidth_demand: int
    reliability_demand: float
    latency_tolerance: float

    def check(self) -> None:
        if self.resource_demand <= 0:
            raise FleetError(f"uav {self.uav_id}: resource demand must be > 0")
        if self.bandwidth_demand <= 0:
            raise FleetError(f"uav {self.uav_id}: bandwidth demand must be > 0")
        if not 0 < self.reliability_demand <= 1:
            raise FleetError(f"uav {self.uav_id}: reliability demand must lie in (0, 1]")
        if self.latency_tolerance <= 0:
            raise FleetError(f"uav {self.uav_id}: latency tolerance must be > 0")

    @property
    def qos(self) -> tuple[float, float]:
        return (self.latency_tolerance, self.reliability_demand)


@dataclass(frozen=True)
class TimeHorizon:
    periods: int
    period_length_s: float = 60.0

    def __post_init__(self) -> None:
        if self.periods < 1:
            raise FleetError("time horizon needs at least one period")

    def __iter__(self):
        return iter(range(1, self.periods + 1))


@dataclass(frozen=True)
class FlightPlan:
    """Ordered base stations a UAV flies across, with the period it reaches each one.

    Stops whose arrival period falls after ``end_period`` are part of the
    trajectory but never actually visited.
    """

    uav_id: int
    trajectory: tuple[int, ...]
    arrival_periods: tuple[int, ...]
    end_period: int

    def check(self, horizon: TimeHorizon, graph: NetworkGraph | None = None) -> None:
        u = self.uav_id
        if not self.trajectory:
            raise FleetError(f"uav {u}: empty trajectory")
        if len(self.trajectory) != len(self.arrival_periods):
            raise FleetError(f"uav {u}: trajectory and arrival periods differ in length")
        for prev, nxt in zip(self.arrival_periods, self.arrival_periods[1:]):
            if nxt <= prev:
                raise FleetError(f"uav {u}: arrival periods must be strictly increasing")
        for prev, nxt in zip(self.trajectory, self.trajectory[1:]):
            if prev == nxt:
                raise FleetError(f"uav {u}: consecutive trajectory entries repeat node {prev}")
        if any(p > horizon.periods for p in self.arrival_periods):
            raise FleetError(f"uav {u}: arrival period beyond horizon of {horizon.periods}")
        if not 1 <= self.arrival_periods[0] <= self.end_period <= horizon.periods:
            raise FleetError(
                f"uav {u}: need 1 <= first arrival ({self.arrival_periods[0]}) <= "
                f"end period ({self.end_period}) <= {horizon.periods}"
            )
        if graph is not None:
            for a in self.trajectory:
                if not 0 <= a < graph.num_nodes or graph.kinds[a] is not NodeKind.ACCESS:
                    raise FleetError(f"uav {u}: trajectory node {a} is not an access node")

    @property
    def stops(self) -> tuple[int, ...]:
        """Distinct access nodes of the trajectory in first-visit order (the set T_u)."""
        return tuple(dict.fromkeys(self.trajectory))


@dataclass(frozen=True)
class AttachmentSchedule:
    """For each UAV, the access node it is attached to in each period (``None`` when idle).

    ``attached[u][t - 1]`` is the attachment at period ``t``.
    """

    horizon: TimeHorizon
    attached: Mapping[int, tuple[int | None, ...]]

    def z(self, u: int, a: int, t: int) -> int:
        row = self.attached.get(u)
        if row is None or not 1 <= t <= len(row):
            return 0
        return int(row[t - 1] == a)

    def periods_at(self, u: int, a: int) -> tuple[int, ...]:
        row = self.attached.get(u, ())
        return tuple(t for t, node in enumerate(row, start=1) if node == a)

    def active_periods(self, u: int) -> tuple[int, ...]:
        row = self.attached.get(u, ())
        return tuple(t for t, node in enumerate(row, start=1) if node is not None)


def derive_attachment_schedule(plans: Iterable[FlightPlan], horizon: TimeHorizon) -> AttachmentSchedule:
    """Step-function attachment: within the active window, the most recently reached stop."""
    attached: dict[int, tuple[int | None, ...]] = {}
    for plan in plans:
        plan.check(horizon)
        if plan.uav_id in attached:
            raise FleetError(f"duplicate flight plan for uav {plan.uav_id}")
        row: list[int | None] = [None] * horizon.periods
        for t in range(plan.arrival_periods[0], plan.end_period + 1):
            current = None
            for node, arrive in zip(plan.trajectory, plan.arrival_periods):
                if arrive <= t:
                    current = node
                else:
                    break
            row[t - 1] = current
        attached[plan.uav_id] = tuple(row)
    return AttachmentSchedule(horizon, attached)


def dwell_periods(schedule: AttachmentSchedule, u: int, a: int) -> int:
    return len(schedule.periods_at(u, a))
