"""Independent reference computations used to validate the fast paths.

Everything here deliberately avoids the grid arithmetic under test: hop
distances come from breadth-first search over explicitly enumerated links,
gateway sets from scanning every satellite, survival probabilities from
Monte-Carlo sampling.  Keep it that way.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .constellation import (
    GroundRelay,
    SatelliteState,
    WalkerDeltaConfig,
    coverage_angle,
    elevation_angle,
)
from .rtpg import GridSnapshot


def isl_adjacency(config: WalkerDeltaConfig) -> list[list[int]]:
    """Adjacency lists of the ISL mesh over flat ids 1..S (index 0 unused)."""
    nn, mm = config.num_orbits, config.sats_per_orbit
    adj: list[list[int]] = [[] for _ in range(config.total_sats + 1)]
    for n in range(1, nn + 1):
        for m in range(1, mm + 1):
            i = (n - 1) * mm + m
            up = (n - 1) * mm + (m % mm) + 1
            down = (n - 1) * mm + ((m - 2) % mm) + 1
            left = ((n - 2) % nn) * mm + m
            right = (n % nn) * mm + m
            adj[i] = [up, down, left, right]
    return adj


def bfs_hops(adj: list[list[int]], src: int) -> np.ndarray:
    """Hop distance from src to every node; index 0 unused, -1 unreachable."""
    dist = np.full(len(adj), -1, dtype=np.int32)
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv + 1
                queue.append(w)
    return dist


def isl_hop_table(config: WalkerDeltaConfig, sources) -> dict[int, np.ndarray]:
    """BFS distance rows for each requested source over the pure ISL mesh."""
    adj = isl_adjacency(config)
    return {int(s): bfs_hops(adj, int(s)) for s in sources}


def brute_force_gateways(
    snapshot: GridSnapshot, relays: list[GroundRelay], config: WalkerDeltaConfig
) -> dict[int, list[int]]:
    """Gateway sets by scanning all K*S pairs with the elevation formula."""
    out: dict[int, list[int]] = {}
    for relay in relays:
        members = []
        for i in range(1, config.total_sats + 1):
            state = SatelliteState(
                lat=float(snapshot.lat[i - 1]),
                lon=float(snapshot.lon[i - 1]),
                phase=float(snapshot.u_norm[i - 1]),
                ascending=bool(snapshot.ascending[i - 1]),
            )
            if elevation_angle(relay, state, config) >= relay.min_elevation:
                members.append(i)
        out[relay.relay_id] = members
    return out


def brute_force_gateways_fast(
    snapshot: GridSnapshot, relays: list[GroundRelay], config: WalkerDeltaConfig
) -> dict[int, list[int]]:
    """Same scan vectorized via the central-angle threshold (for big sweeps)."""
    units = snapshot.unit_vectors()
    out: dict[int, list[int]] = {}
    for relay in relays:
        rv = np.array(
            [
                np.cos(relay.lat) * np.cos(relay.lon),
                np.cos(relay.lat) * np.sin(relay.lon),
                np.sin(relay.lat),
            ]
        )
        beta = coverage_angle(relay.min_elevation, config)
        cos_sigma = units @ rv
        members = np.nonzero(cos_sigma >= np.cos(beta))[0] + 1
        out[relay.relay_id] = [int(x) for x in members]
    return out


def cooperative_adjacency(
    config: WalkerDeltaConfig, gateway_sets: dict[int, list[int]]
) -> list[list[int]]:
    """ISL mesh plus unit-weight SGL edges; relays occupy ids S+1..S+K."""
    adj = isl_adjacency(config)
    relay_ids = sorted(gateway_sets)
    base = config.total_sats
    index_of = {rid: base + 1 + k for k, rid in enumerate(relay_ids)}
    adj.extend([] for _ in relay_ids)
    for rid in relay_ids:
        rnode = index_of[rid]
        for sat in gateway_sets[rid]:
            adj[sat].append(rnode)
            adj[rnode].append(sat)
    return adj


def cooperative_hop_table(
    config: WalkerDeltaConfig, gateway_sets: dict[int, list[int]], sources
) -> dict[int, np.ndarray]:
    """Unit-weight shortest hop counts on the satellite+relay graph.

    With every edge of weight one this equals Dijkstra on the full graph;
    BFS just computes it faster.
    """
    adj = cooperative_adjacency(config, gateway_sets)
    return {int(s): bfs_hops(adj, int(s)) for s in sources}


def lattice_survival_mc(
    h_h: int, h_v: int, p: float, q: float, samples: int, seed: int
) -> float:
    """Monte-Carlo estimate of the probability that some monotone lattice
    path from (0,0) to (h_h, h_v) has all its edges available.

    Horizontal edges are up with probability p, vertical edges with q; an
    edge is a single trial shared by every path through it.  Reachability is
    evaluated by dynamic programming over the grid per sample batch.
    """
    rng = np.random.default_rng(seed)
    alive_total = 0
    remaining = samples
    batch = min(samples, 200_000)
    while remaining > 0:
        nsamp = min(batch, remaining)
        # edge states: h_edges[x, y] for (x,y)->(x+1,y); v_edges[x, y] for (x,y)->(x,y+1)
        h_edges = rng.random((nsamp, h_h, h_v + 1)) < p if h_h else None
        v_edges = rng.random((nsamp, h_h + 1, h_v)) < q if h_v else None
        reach = np.zeros((nsamp, h_h + 1, h_v + 1), dtype=bool)
        reach[:, 0, 0] = True
        for x in range(h_h + 1):
            for y in range(h_v + 1):
                if x == 0 and y == 0:
                    continue
                ok = np.zeros(nsamp, dtype=bool)
                if x > 0 and h_edges is not None:
                    ok |= reach[:, x - 1, y] & h_edges[:, x - 1, y]
                if y > 0 and v_edges is not None:
                    ok |= reach[:, x, y - 1] & v_edges[:, x, y - 1]
                reach[:, x, y] = ok
        alive_total += int(reach[:, h_h, h_v].sum())
        remaining -= nsamp
    return alive_total / samples
