"""Key-node graph (KNBG): gateway extraction, weighted edges, route estimation.

Satellites currently visible from a ground relay are *gateways* (key nodes).
The graph over all gateways, with minimum ISL hop counts as edge weights
(capped at 2 for pairs that share a relay, since crossing the relay costs a
downlink plus an uplink hop), supports end-to-end hop estimation for the
cooperative forwarding mode at a fraction of the full-graph cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constellation import (
    GroundRelay,
    WalkerDeltaConfig,
    coverage_angle,
    lon_offset_from_node,
)
from .minhop import Direction, estimate_many, estimate_min_hops
from .rtpg import GridSnapshot, RegionCoord, region_coords, satellite_phase


@dataclass(frozen=True)
class SearchExtent:
    """Rectangular grid window guaranteed to contain a relay's gateways.

    ``delta_P``/``delta_R`` are full (even) window widths; the scan covers
    center +/- half-width in each axis, once around the ascending pseudo
    coordinate and once around the descending one.  ``empty`` flags relays
    whose latitude puts them outside any satellite's coverage.
    """

    r_s: float
    beta: float
    delta_P: int
    delta_R: int
    ascending_center: RegionCoord
    descending_center: RegionCoord
    empty: bool = False


def _clamp_lat(lat: float, inclination_rad: float) -> float:
    return min(inclination_rad, max(-inclination_rad, lat))


def search_extent(relay: GroundRelay, config: WalkerDeltaConfig) -> SearchExtent:
    """Window sizes and centers for the gateway scan around one relay.

    The relay is treated as an ascending and as a descending pseudo
    satellite to get the two window centers.  The column half-width covers
    both the longitude extent of the coverage cap and the ascending-node
    longitude spread across the cap's latitude band (the node longitude of
    a satellite shifts with its phase, so latitude changes move the column
    coordinate too).  The row half-width covers the phase span of the band.
    """
    beta = coverage_angle(relay.min_elevation, config)
    r_s = config.earth_radius_km * beta
    alpha = config.inclination_rad
    if abs(relay.lat) > alpha + beta:
        return SearchExtent(r_s, beta, 0, 0, RegionCoord(0, 0), RegionCoord(0, 0), empty=True)

    lat_c = _clamp_lat(relay.lat, alpha)
    lat_lo = _clamp_lat(relay.lat - beta, alpha)
    lat_hi = _clamp_lat(relay.lat + beta, alpha)
    u_c = satellite_phase(lat_c, True, alpha)
    u_lo = satellite_phase(lat_lo, True, alpha)
    u_hi = satellite_phase(lat_hi, True, alpha)

    # longitude half-width of the coverage cap
    sin_ratio = math.sin(beta) / max(math.cos(relay.lat), 1e-12)
    dlam = math.asin(sin_ratio) if sin_ratio < 1.0 else math.pi

    xi_c = lon_offset_from_node(u_c, alpha)
    dxi = max(
        lon_offset_from_node(u_hi, alpha) - xi_c,
        xi_c - lon_offset_from_node(u_lo, alpha),
    )
    # over-wide windows are harmless: the scan deduplicates wrapped columns/rows
    half_p = math.ceil((dlam + dxi) / config.delta_omega)
    half_r = math.ceil(max(u_hi - u_c, u_c - u_lo) / config.delta_phi)
    delta_p = 2 * max(1, half_p)
    delta_r = 2 * max(1, half_r)

    u_c_desc = satellite_phase(lat_c, False, alpha)
    asc_center = region_coords(
        (relay.lon - xi_c) % (2 * math.pi), u_c, config
    )
    desc_center = region_coords(
        (relay.lon - lon_offset_from_node(u_c_desc, alpha)) % (2 * math.pi), u_c_desc, config
    )
    return SearchExtent(r_s, beta, delta_p, delta_r, asc_center, desc_center)


def _window_regions(center: RegionCoord, half_p: int, half_r: int,
                    config: WalkerDeltaConfig):
    nn, mm = config.num_orbits, config.sats_per_orbit
    ps = [(center.P + dp) % nn for dp in range(-half_p, half_p + 1)]
    rs = [(center.R + dr) % mm for dr in range(-half_r, half_r + 1)]
    return [(p, r) for p in set(ps) for r in set(rs)]


def extract_key_nodes(
    snapshot: GridSnapshot,
    relays: list[GroundRelay],
    config: WalkerDeltaConfig,
    stats: dict | None = None,
) -> dict[int, list[int]]:
    """Gateway sets per relay via the windowed grid scan.

    Scans only the regions inside each relay's two search windows and keeps
    the satellites within the coverage central angle (equivalent to the
    elevation mask).  The result equals the brute-force scan over all
    satellites; ``stats['regions_scanned']`` counts visited regions when a
    dict is supplied.
    """
    units = snapshot.unit_vectors()
    out: dict[int, list[int]] = {}
    scanned = 0
    for relay in relays:
        ext = search_extent(relay, config)
        if ext.empty:
            out[relay.relay_id] = []
            continue
        half_p, half_r = ext.delta_P // 2, ext.delta_R // 2
        candidates: set[int] = set()
        for center in (ext.ascending_center, ext.descending_center):
            regions = _window_regions(center, half_p, half_r, config)
            scanned += len(regions)
            for key in regions:
                sat = snapshot.region_to_sat.get(key)
                if sat is not None:
                    candidates.add(sat)
        if not candidates:
            out[relay.relay_id] = []
            continue
        idx = np.fromiter(candidates, dtype=np.int64)
        rv = np.array(
            [
                math.cos(relay.lat) * math.cos(relay.lon),
                math.cos(relay.lat) * math.sin(relay.lon),
                math.sin(relay.lat),
            ]
        )
        cos_sigma = units[idx - 1] @ rv
        members = idx[cos_sigma >= math.cos(ext.beta)]
        out[relay.relay_id] = sorted(int(x) for x in members)
    if stats is not None:
        stats["regions_scanned"] = scanned
    return out


def edge_weight(
    i: int,
    j: int,
    gateway_sets: dict[int, list[int]],
    snapshot: GridSnapshot,
    config: WalkerDeltaConfig,
) -> int:
    """Weight between two key nodes: ISL hop count, capped at 2 when the
    nodes share a relay (down plus up across the relay)."""
    h = estimate_min_hops(i, j, snapshot, config).h_min
    shares = any(i in members and j in members for members in
                 (set(m) for m in gateway_sets.values()))
    return min(2, h) if shares else h


@dataclass
class KnbgGraph:
    """Immutable key-node graph shared for one regeneration period."""

    node_ids: list[int]
    gateway_sets: dict[int, list[int]]
    weights: np.ndarray = field(repr=False)
    generation_time: float = 0.0
    node_relays: dict[int, frozenset[int]] = field(default_factory=dict, repr=False)
    _index: dict[int, int] = field(default_factory=dict, repr=False)
    _dist: np.ndarray | None = field(default=None, repr=False)
    _mid: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.node_ids)

    def index_of(self, node_id: int) -> int | None:
        return self._index.get(node_id)

    def key_node_path(self, a_idx: int, b_idx: int) -> list[int]:
        """Shortest node-index path a..b from the precomputed midpoints."""
        if a_idx == b_idx:
            return [a_idx]
        mid = int(self._mid[a_idx, b_idx])
        if mid < 0:
            return [a_idx, b_idx]
        left = self.key_node_path(a_idx, mid)
        right = self.key_node_path(mid, b_idx)
        return left + right[1:]


def build_knbg(
    snapshot: GridSnapshot,
    relays: list[GroundRelay],
    config: WalkerDeltaConfig,
    stats: dict | None = None,
) -> KnbgGraph:
    """Extract gateways, generate all pairwise weights, and precompute the
    all-pairs shortest hop distances used by route estimation."""
    gateway_sets = extract_key_nodes(snapshot, relays, config, stats=stats)
    node_relays: dict[int, set[int]] = {}
    for rid, members in gateway_sets.items():
        for sat in members:
            node_relays.setdefault(sat, set()).add(rid)
    node_ids = sorted(node_relays)
    n = len(node_ids)
    ids = np.asarray(node_ids, dtype=np.int64)
    weights = np.zeros((n, n), dtype=np.float64)
    for a in range(n):
        weights[a] = estimate_many(node_ids[a], ids, snapshot, config)
    if n:
        share = np.zeros((n, n), dtype=bool)
        index = {nid: k for k, nid in enumerate(node_ids)}
        for members in gateway_sets.values():
            rows = np.asarray([index[s] for s in members], dtype=np.int64)
            share[np.ix_(rows, rows)] = True
        weights = np.where(share, np.minimum(weights, 2.0), weights)
        np.fill_diagonal(weights, 0.0)
    else:
        index = {}

    dist = weights.copy()
    mid = np.full((n, n), -1, dtype=np.int32)
    for k in range(n):
        via = dist[:, k : k + 1] + dist[k : k + 1, :]
        better = via < dist
        if better.any():
            dist = np.where(better, via, dist)
            mid[better] = k
    return KnbgGraph(
        node_ids=node_ids,
        gateway_sets={k: list(v) for k, v in gateway_sets.items()},
        weights=weights,
        generation_time=snapshot.t,
        node_relays={k: frozenset(v) for k, v in node_relays.items()},
        _index=index,
        _dist=dist,
        _mid=mid,
    )


@dataclass(frozen=True)
class InterSatLeg:
    """Pure ISL stretch of a route plan."""

    start: int
    end: int
    direction: Direction
    h_h: int
    h_v: int

    @property
    def hops(self) -> int:
        return self.h_h + self.h_v


@dataclass(frozen=True)
class CoopLeg:
    """Relay crossing: downlink from one gateway, uplink to another (2 hops)."""

    down_gateway: int
    relay_id: int
    up_gateway: int

    @property
    def hops(self) -> int:
        return 2


@dataclass(frozen=True)
class RoutePlan:
    """Ordered legs from source to destination; endpoints chain."""

    src: int
    dst: int
    legs: tuple

    @property
    def total_hops(self) -> int:
        return sum(leg.hops for leg in self.legs)


def _intersat_leg(a: int, b: int, snapshot: GridSnapshot,
                  config: WalkerDeltaConfig) -> InterSatLeg:
    est = estimate_min_hops(a, b, snapshot, config)
    return InterSatLeg(a, b, est.direction, est.h_h, est.h_v)


def shared_relay(a: int, b: int, graph: KnbgGraph) -> int | None:
    """Lowest relay id both nodes are gateways of, if any."""
    ra = graph.node_relays.get(a)
    rb = graph.node_relays.get(b)
    if not ra or not rb:
        return None
    common = ra & rb
    return min(common) if common else None


def estimate_route(
    src: int,
    dst: int,
    graph: KnbgGraph,
    snapshot: GridSnapshot,
    config: WalkerDeltaConfig,
) -> RoutePlan:
    """Minimum end-to-end hop plan between two satellites using the key-node
    graph plus transient source/destination overlay edges.

    The direct ISL edge src-dst is always a candidate, so the plan exists
    even with an empty graph.  Consecutive same-relay gateways joined at
    weight 2 become relay crossings; every other edge becomes an ISL leg
    carrying its direction and hop split.
    """
    if src == dst:
        return RoutePlan(src, dst, ())
    direct = estimate_min_hops(src, dst, snapshot, config).h_min
    n = graph.size
    if n == 0:
        return RoutePlan(src, dst, (_intersat_leg(src, dst, snapshot, config),))

    ids = np.asarray(graph.node_ids, dtype=np.int64)
    h_src = estimate_many(src, ids, snapshot, config).astype(np.float64)
    h_dst = estimate_many(dst, ids, snapshot, config).astype(np.float64)
    combined = h_src[:, None] + graph._dist + h_dst[None, :]
    flat_best = int(np.argmin(combined))
    best = float(combined.flat[flat_best])
    if direct <= best:
        return RoutePlan(src, dst, (_intersat_leg(src, dst, snapshot, config),))

    i_star, j_star = divmod(flat_best, n)
    node_seq = [src]
    node_seq.extend(graph.node_ids[k] for k in graph.key_node_path(i_star, j_star))
    node_seq.append(dst)
    # collapse repeats when src or dst is itself the entry/exit key node
    seq: list[int] = []
    for node in node_seq:
        if not seq or seq[-1] != node:
            seq.append(node)

    legs: list = []
    for a, b in zip(seq, seq[1:]):
        relay = shared_relay(a, b, graph)
        if relay is not None and estimate_min_hops(a, b, snapshot, config).h_min >= 2:
            legs.append(CoopLeg(a, relay, b))
        else:
            legs.append(_intersat_leg(a, b, snapshot, config))
    return RoutePlan(src, dst, tuple(legs))
