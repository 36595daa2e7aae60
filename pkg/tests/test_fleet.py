import pytest
from hypothesis import given, strategies as st

from uavorch.fleet import (AttachmentSchedule, FleetError, FlightPlan, TimeHorizon, UavDemand,
                           derive_attachment_schedule, dwell_periods)

A1, A2, A3 = 10, 11, 12


def schedule_of(*plans, periods=5):
    return derive_attachment_schedule(plans, TimeHorizon(periods))


def test_two_stop_step_function():
    s = schedule_of(FlightPlan(0, (A1, A2), (1, 3), 4), periods=5)
    assert s.periods_at(0, A1) == (1, 2)
    assert s.periods_at(0, A2) == (3, 4)
    assert s.active_periods(0) == (1, 2, 3, 4)
    assert s.attached[0][4] is None
    assert dwell_periods(s, 0, A1) == 2


def test_single_stop_whole_horizon():
    s = schedule_of(FlightPlan(0, (A1,), (1,), 30), periods=30)
    assert s.periods_at(0, A1) == tuple(range(1, 31))


def test_arrival_beyond_horizon_is_an_error():
    with pytest.raises(FleetError):
        schedule_of(FlightPlan(0, (A1, A2), (1, 31), 30), periods=30)


def test_off_trajectory_dwell_is_zero():
    s = schedule_of(FlightPlan(0, (A1,), (2,), 3))
    assert dwell_periods(s, 0, A3) == 0
    assert dwell_periods(s, 9, A1) == 0
    assert s.z(0, A1, 1) == 0 and s.z(0, A1, 2) == 1 and s.z(0, A1, 99) == 0


def test_arrival_after_end_gives_zero_dwell():
    s = schedule_of(FlightPlan(0, (A1, A2), (1, 4), 3))
    assert dwell_periods(s, 0, A2) == 0
    assert dwell_periods(s, 0, A1) == 3


def test_revisited_stop_accumulates_dwell():
    s = schedule_of(FlightPlan(0, (A1, A2, A1), (1, 2, 4), 5))
    assert FlightPlan(0, (A1, A2, A1), (1, 2, 4), 5).stops == (A1, A2)
    assert s.periods_at(0, A1) == (1, 4, 5)


@pytest.mark.parametrize("plan", [
    FlightPlan(0, (), (), 1),
    FlightPlan(0, (A1, A2), (1,), 3),
    FlightPlan(0, (A1, A2), (2, 2), 3),
    FlightPlan(0, (A1, A1), (1, 2), 3),
    FlightPlan(0, (A1,), (3,), 2),
    FlightPlan(0, (A1,), (1,), 6),
    FlightPlan(0, (A1,), (0,), 2),
])
def test_invalid_plans(plan):
    with pytest.raises(FleetError):
        plan.check(TimeHorizon(5))


def test_duplicate_plans_rejected():
    with pytest.raises(FleetError):
        schedule_of(FlightPlan(0, (A1,), (1,), 2), FlightPlan(0, (A2,), (1,), 2))


@pytest.mark.parametrize("demand", [
    UavDemand(0, 0, 50, 0.95, 10.0),
    UavDemand(0, 10, 0, 0.95, 10.0),
    UavDemand(0, 10, 50, 0.0, 10.0),
    UavDemand(0, 10, 50, 1.5, 10.0),
    UavDemand(0, 10, 50, 0.95, 0.0),
])
def test_invalid_demands(demand):
    with pytest.raises(FleetError):
        demand.check()


def test_horizon_needs_a_period():
    with pytest.raises(FleetError):
        TimeHorizon(0)


@st.composite
def plans(draw):
    periods = draw(st.integers(1, 12))
    n = draw(st.integers(1, min(4, periods)))
    arrivals = sorted(draw(st.lists(st.integers(1, periods), min_size=n, max_size=n, unique=True)))
    traj = [draw(st.sampled_from([A1, A2, A3]))]
    for _ in range(n - 1):
        traj.append(draw(st.sampled_from([a for a in (A1, A2, A3) if a != traj[-1]])))
    end = draw(st.integers(arrivals[0], periods))
    return FlightPlan(0, tuple(traj), tuple(arrivals), end), periods


@given(plans())
def test_schedule_invariants(case):
    plan, periods = case
    s = derive_attachment_schedule([plan], TimeHorizon(periods))
    # single attachment per period and support on the trajectory
    for t in range(1, periods + 1):
        assert sum(s.z(0, a, t) for a in (A1, A2, A3)) <= 1
        for a in (A1, A2, A3):
            if s.z(0, a, t):
                assert a in plan.trajectory
    # coverage
    total = sum(dwell_periods(s, 0, a) for a in plan.stops)
    assert total == plan.end_period - plan.arrival_periods[0] + 1
    # order preservation: run-length sequence equals the visited trajectory prefix
    seq = [x for x in s.attached[0] if x is not None]
    runs = [x for i, x in enumerate(seq) if i == 0 or seq[i - 1] != x]
    visited = [a for a, p in zip(plan.trajectory, plan.arrival_periods) if p <= plan.end_period]
    assert runs == visited


def test_schedule_is_plain_data():
    s = AttachmentSchedule(TimeHorizon(2), {0: (A1, None)})
    assert s.periods_at(0, A1) == (1,)
