"""Builders for hand-made and tiny random scenarios shared by the test modules."""

from __future__ import annotations

import random
from dataclasses import dataclass

from uavorch.fleet import FlightPlan, TimeHorizon, UavDemand
from uavorch.scenario import Scenario
from uavorch.topology import HostSpec, LinkSpec, NodeKind, build_graph

A, T, M, D, S = (NodeKind.ACCESS, NodeKind.TRANSIT, NodeKind.EDGE_BS,
                 NodeKind.EDGE_AGG, NodeKind.CLOUD)


@dataclass(frozen=True)
class Uav:
    demand: int = 10
    bandwidth: int = 50
    reliability: float = 0.95
    latency: float = 50.0
    trajectory: tuple[int, ...] = (0,)
    arrivals: tuple[int, ...] = (1,)
    end: int = 1


def link(u, v, latency=1.0, p=0.0, bw=1000):
    return LinkSpec(u, v, latency, p, bw)


def make_scenario(kinds, links, hosts, uavs, periods=5, seed=0) -> Scenario:
    """``hosts`` maps node -> (capacity, unit_cost)."""
    graph = build_graph(kinds, links, [HostSpec(n, c, k) for n, (c, k) in sorted(hosts.items())])
    demands = tuple(UavDemand(i, x.demand, x.bandwidth, x.reliability, x.latency)
                    for i, x in enumerate(uavs))
    plans = tuple(FlightPlan(i, tuple(x.trajectory), tuple(x.arrivals), x.end)
                  for i, x in enumerate(uavs))
    return Scenario(graph, demands, plans, TimeHorizon(periods), seed)


def edge_vs_cloud(uavs=None, edge_cost=500, cloud_cost=100, cloud_latency=1.0, periods=5):
    """Access 0 with a BS edge host 1 and, through transit 2, a cloud host 3."""
    kinds = [A, M, T, S]
    links = [link(0, 1, 1.0, 0.0), link(0, 2, 1.0, 0.0), link(2, 3, cloud_latency, 0.0)]
    hosts = {1: (100, edge_cost), 3: (100, cloud_cost)}
    uavs = uavs or [Uav(trajectory=(0,), arrivals=(1,), end=5, latency=50.0, reliability=0.95)]
    return make_scenario(kinds, links, hosts, uavs, periods)


def two_bs_line(latency=2.0):
    """Two access points 0 and 1, each with its own BS edge host (2 and 3), joined by
    transit 4. Only the co-located host is within ``latency`` of each access point."""
    kinds = [A, A, M, M, T]
    links = [link(0, 2, 2.0), link(1, 3, 2.0), link(0, 4, 1.0), link(1, 4, 1.0)]
    hosts = {2: (100, 500), 3: (100, 600)}
    uav = Uav(latency=latency, reliability=0.95, trajectory=(0, 1), arrivals=(1, 3), end=4)
    return make_scenario(kinds, links, hosts, [uav], periods=4)


def random_tiny_scenario(seed: int, max_uavs: int = 3, max_stops: int = 3,
                         max_periods: int = 6) -> Scenario:
    """A random instance within the brute-force guard rails.

    At most 10 nodes and 5 hosts; every host is a leaf. Capacities and link
    bandwidths are drawn close to the demands so that those constraints bind.
    """
    rng = random.Random(seed)
    n_access = rng.randint(2, 3)
    n_transit = rng.randint(1, 2)
    n_edge = rng.randint(1, min(2, n_access))
    n_agg = rng.randint(0, 1)
    n_cloud = rng.randint(1, 2)
    kinds = [A] * n_access + [T] * n_transit + [M] * n_edge + [D] * n_agg + [S] * n_cloud
    assert len(kinds) <= 10

    def draw_link(u, v):
        return link(u, v, rng.choice([1.0, 1.5, 2.0, 2.5, 3.0]),
                    rng.choice([0.0, 0.001, 0.005, 0.01]), rng.choice([100, 150, 200]))

    transit = list(range(n_access, n_access + n_transit))
    links = []
    pairs = set()

    def add(u, v):
        key = (min(u, v), max(u, v))
        if key not in pairs and u != v:
            pairs.add(key)
            links.append(draw_link(u, v))

    for a in range(n_access):
        add(a, rng.choice(transit))
    for i in range(1, len(transit)):
        add(transit[i - 1], transit[i])
    for _ in range(rng.randint(0, 2)):
        add(rng.randrange(n_access), rng.choice(transit))
    hosts = {}
    nxt = n_access + n_transit
    for k in range(n_edge):
        add(nxt, k)
        hosts[nxt] = (rng.choice([20, 30, 40]), rng.randint(50, 100))
        nxt += 1
    for _ in range(n_agg):
        add(nxt, rng.choice(transit))
        hosts[nxt] = (rng.choice([20, 30, 40]), rng.randint(25, 50))
        nxt += 1
    for _ in range(n_cloud):
        add(nxt, rng.choice(transit))
        hosts[nxt] = (rng.choice([30, 40, 60]), rng.randint(10, 30))
        nxt += 1

    periods = rng.randint(2, max_periods)
    uavs = []
    for _ in range(rng.randint(1, max_uavs)):
        stops = rng.randint(1, min(max_stops, periods))
        traj = [rng.randrange(n_access)]
        while len(traj) < stops:
            traj.append(rng.choice([a for a in range(n_access) if a != traj[-1]]))
        arrivals = sorted(rng.sample(range(1, periods + 1), stops))
        end = rng.randint(arrivals[-1], periods)
        uavs.append(Uav(demand=rng.randint(10, 20), bandwidth=rng.randint(50, 100),
                        reliability=rng.choice([0.95, 0.97, 0.98, 0.99]),
                        latency=rng.choice([3.0, 4.0, 5.0, 6.0, 8.0, 10.0]),
                        trajectory=tuple(traj), arrivals=tuple(arrivals), end=end))
    return make_scenario(kinds, links, hosts, uavs, periods, seed)
