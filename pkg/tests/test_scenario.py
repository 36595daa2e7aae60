import pytest
from hypothesis import given, settings, strategies as st

from uavorch import jsonio
from uavorch.scenario import (PROFILES, Scenario, ScenarioError, ScenarioParams, desk_params,
                              generate_scenario, load_scenario, save_scenario, table1_params)
from uavorch.topology import NodeKind, validate_topology


def count(graph, kind):
    return len(graph.nodes_of(kind))


def test_table1_counts_seed_42():
    g = generate_scenario(table1_params(seed=42)).graph
    assert count(g, NodeKind.ACCESS) == 20
    assert count(g, NodeKind.EDGE_BS) == 20
    assert count(g, NodeKind.EDGE_AGG) == 3
    assert count(g, NodeKind.CLOUD) == 15
    assert count(g, NodeKind.TRANSIT) == 37


def test_table1_values_are_the_tabulated_ones():
    p = table1_params()
    assert (p.base_stations, p.edge_hosts, p.aggregation_hosts, p.cloud_hosts) == (20, 20, 3, 15)
    assert p.edge_cost == (500, 1000) and p.agg_cost == (250, 500) and p.cloud_cost == (100, 300)
    assert p.edge_capacity == (200, 400) and p.agg_capacity == (400, 800)
    assert p.cloud_capacity == (800, 1600)
    assert p.link_latency_ms == (1.0, 3.0) and p.link_failure_prob == (0.0, 0.01)
    assert p.link_bandwidth_mbps == (1000, 10000)
    assert p.uav_demand == (10, 20) and p.uav_bandwidth_mbps == (50, 100)
    assert p.uav_reliability == (0.95, 0.99) and p.uav_latency_ms == (1.0, 50.0)
    assert p.periods == 30


def test_same_seed_identical_serialization():
    a = generate_scenario(table1_params(seed=42)).dumps()
    b = generate_scenario(table1_params(seed=42)).dumps()
    assert a == b
    assert generate_scenario(table1_params(seed=43)).dumps() != a


def test_edge_host_costs_in_range():
    g = generate_scenario(table1_params(seed=42)).graph
    costs = [g.host(h).unit_cost for h in g.nodes_of(NodeKind.EDGE_BS)]
    assert all(500 <= c <= 1000 for c in costs)


def in_range(x, bounds):
    return bounds[0] <= x <= bounds[1]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63), st.sampled_from(sorted(PROFILES)))
def test_generator_ranges_and_validity(seed, profile):
    params = PROFILES[profile](seed=seed, uavs=3)
    sc = generate_scenario(params)
    g = sc.graph
    assert validate_topology(g) == []
    for l in g.links:
        assert in_range(l.latency, params.link_latency_ms)
        assert in_range(l.failure_prob, params.link_failure_prob)
        assert in_range(l.bandwidth, params.link_bandwidth_mbps)
    ranges = {NodeKind.EDGE_BS: (params.edge_capacity, params.edge_cost),
              NodeKind.EDGE_AGG: (params.agg_capacity, params.agg_cost),
              NodeKind.CLOUD: (params.cloud_capacity, params.cloud_cost)}
    for spec in g.hosts:
        cap, cost = ranges[g.kind(spec.node)]
        assert in_range(spec.capacity, cap) and in_range(spec.unit_cost, cost)
    for d, plan in zip(sc.uavs, sc.plans):
        assert in_range(d.resource_demand, params.uav_demand)
        assert in_range(d.bandwidth_demand, params.uav_bandwidth_mbps)
        assert in_range(d.reliability_demand, params.uav_reliability)
        assert in_range(d.latency_tolerance, params.uav_latency_ms)
        assert in_range(len(plan.trajectory), params.mission_length)
        # every stop is actually visited
        assert plan.arrival_periods[-1] <= plan.end_period
    assert len(sc.uavs) == 3


@pytest.mark.parametrize("seed", range(5))
def test_mean_core_degree_at_least_three(seed):
    params = table1_params(seed=seed, uavs=0)
    g = generate_scenario(params).graph
    # aggregation points are the first transit ids and hang off the mesh
    core = g.nodes_of(NodeKind.TRANSIT)[params.aggregation_hosts:]
    core_set = set(core)
    degree = sum(len(g.neighbors(c) & core_set) for c in core) / len(core)
    assert degree >= 3.0


def test_json_roundtrip_byte_identical(tmp_path):
    sc = generate_scenario(desk_params(seed=5))
    path = tmp_path / "s.json"
    save_scenario(sc, path)
    again = load_scenario(path)
    assert again.dumps() == sc.dumps()
    assert again.graph == sc.graph and again.uavs == sc.uavs and again.plans == sc.plans


def test_json_has_documented_keys():
    doc = jsonio.loads(generate_scenario(desk_params(seed=5)).dumps())
    assert set(doc) == {"nodes", "links", "hosts", "uavs", "periods", "seed", "params"}
    assert set(doc["links"][0]) == {"u", "v", "latency_ms", "failure_prob", "bandwidth_mbps"}


def test_params_roundtrip():
    p = desk_params(seed=11, uavs=2)
    assert ScenarioParams.from_json(p.to_json()) == p


@pytest.mark.parametrize("bad", [
    dict(base_stations=0), dict(edge_hosts=30), dict(uavs=-1), dict(core_nodes=3),
    dict(edge_cost=(10, 5)), dict(mission_length=(0, 2)), dict(mission_length=(1, 50)),
    dict(uav_reliability=(0.0, 0.9)), dict(link_failure_prob=(0.0, 1.0)),
])
def test_bad_params(bad):
    with pytest.raises(ScenarioError):
        table1_params(**bad).check()


def test_uav_lookup():
    sc = generate_scenario(desk_params(seed=2))
    assert sc.uav(1).uav_id == 1 and sc.plan(1).uav_id == 1
    with pytest.raises(KeyError):
        sc.uav(99)


def test_mismatched_plans_rejected():
    sc = generate_scenario(desk_params(seed=2))
    with pytest.raises(ScenarioError):
        Scenario(sc.graph, sc.uavs, sc.plans[::-1], sc.horizon)
