"""Closed-form and enumerative analyses: path survival probability, the
complexity ratio of key-node-graph estimation versus the full-graph method,
and the conditions under which shortest-distance paths are also minimum-hop.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .constellation import WalkerDeltaConfig, link_lengths
from .oracles import lattice_survival_mc

# Exact union probabilities are enumerated over monotone lattice paths;
# beyond this total hop count the caller must fall back to Monte-Carlo.
MAX_EXACT_HOPS = 12
# Inclusion-exclusion over path subsets is exponential in the path count;
# larger cases switch to the frontier dynamic program (also exact).
MAX_INCLUSION_EXCLUSION_PATHS = 15


class EnumerationBound(ValueError):
    """Exact survival computation refused; use the Monte-Carlo estimator."""


@dataclass(frozen=True)
class LinkAvailability:
    """Independent availability of inter-orbit links, intra-orbit links, SGLs."""

    p: float
    q: float
    r: float = 1.0

    def __post_init__(self):
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")


def survival_single(h_h: int, h_v: int, links: LinkAvailability) -> float:
    """Survival of a single fixed path: p^h_h * q^h_v."""
    return links.p ** h_h * links.q ** h_v


def survival_lsp(h_h: int, h_v: int, links: LinkAvailability) -> float:
    """Survival under longer-side-priority forwarding.

    The staircase taken by that rule gives pq(2-pq) per paired step and the
    leftover hops in the longer direction contribute their plain factor.
    """
    p, q = links.p, links.q
    paired = (p * q * (2.0 - p * q))
    if h_h >= h_v:
        return p ** (h_h - h_v) * paired ** h_v
    return q ** (h_v - h_h) * paired ** h_h


def _lattice_paths(h_h: int, h_v: int):
    """Edge bitmasks of all monotone paths on the h_h x h_v grid.

    Edges are numbered: horizontal edge (x, y)->(x+1, y) gets bit
    x*(h_v+1)+y; vertical edge (x, y)->(x, y+1) gets H + x*h_v + y where H
    is the horizontal edge count.  Returns (path masks, per-edge factors).
    """
    n_h_edges = h_h * (h_v + 1)
    n_edges = n_h_edges + (h_h + 1) * h_v
    paths = []
    for updowns in itertools.combinations(range(h_h + h_v), h_v):
        x = y = 0
        mask = 0
        vertical_steps = set(updowns)
        for step in range(h_h + h_v):
            if step in vertical_steps:
                mask |= 1 << (n_h_edges + x * h_v + y)
                y += 1
            else:
                mask |= 1 << (x * (h_v + 1) + y)
                x += 1
        paths.append(mask)
    return paths, n_h_edges, n_edges


def _union_inclusion_exclusion(paths, n_h_edges: int, n_edges: int,
                               p: float, q: float) -> float:
    """P(at least one path has all edges up) by inclusion-exclusion over
    path subsets; shared edges are single trials."""
    factors = [p if e < n_h_edges else q for e in range(n_edges)]
    union_prob: dict[int, float] = {}

    def prob_of(mask: int) -> float:
        cached = union_prob.get(mask)
        if cached is not None:
            return cached
        prob = 1.0
        bits = mask
        while bits:
            low = bits & -bits
            prob *= factors[low.bit_length() - 1]
            bits ^= low
        union_prob[mask] = prob
        return prob

    total = 0.0
    n = len(paths)
    for subset in range(1, 1 << n):
        union = 0
        bits = subset
        while bits:
            low = bits & -bits
            union |= paths[low.bit_length() - 1]
            bits ^= low
        sign = 1.0 if bin(subset).count("1") % 2 == 1 else -1.0
        total += sign * prob_of(union)
    return total


def _union_frontier_dp(h_h: int, h_v: int, p: float, q: float) -> float:
    """Exact reachability probability via a frontier dynamic program.

    State: the distribution over subsets of reachable rows in the current
    column.  Columns advance through the horizontal edges (each up with
    probability p); within a column, reachability propagates upward through
    the vertical edges (each up with probability q).
    """
    rows = h_v + 1

    def close_upward(base: int, v_pattern: int) -> int:
        reach = base
        for y in range(1, rows):
            if (reach >> (y - 1)) & 1 and (v_pattern >> (y - 1)) & 1:
                reach |= 1 << y
        return reach

    # distribution over closures for each base subset (column-local)
    n_v = h_v
    closure_dist: list[dict[int, float]] = []
    for base in range(1 << rows):
        dist: dict[int, float] = {}
        for v_pattern in range(1 << n_v):
            prob = 1.0
            for e in range(n_v):
                prob *= q if (v_pattern >> e) & 1 else (1.0 - q)
            closed = close_upward(base, v_pattern)
            dist[closed] = dist.get(closed, 0.0) + prob
        closure_dist.append(dist)

    state = {close: prob for close, prob in closure_dist[1].items()}  # start at (0,0)
    for _x in range(h_h):
        nxt: dict[int, float] = {}
        for reach, prob in state.items():
            # each reachable row independently survives its horizontal edge
            members = [y for y in range(rows) if (reach >> y) & 1]
            for keep_mask in range(1 << len(members)):
                keep_prob = prob
                base = 0
                for bit, y in enumerate(members):
                    if (keep_mask >> bit) & 1:
                        keep_prob *= p
                        base |= 1 << y
                    else:
                        keep_prob *= 1.0 - p
                if keep_prob == 0.0:
                    continue
                for closed, cprob in closure_dist[base].items():
                    nxt[closed] = nxt.get(closed, 0.0) + keep_prob * cprob
        state = nxt
    top = 1 << h_v
    return sum(prob for reach, prob in state.items() if reach & top)


def survival_ours(h_h: int, h_v: int, h_g: int, links: LinkAvailability) -> float:
    """Survival under minimum-hop multipath forwarding with h_g SGL hops.

    All C(h_h+h_v, h_v) monotone lattice paths are admissible; the packet
    survives if at least one has every edge available, and each SGL hop
    multiplies by its own availability.  Exact union probability via
    inclusion-exclusion for small path counts, via the frontier dynamic
    program otherwise; both are exact and cross-checked in tests.
    """
    if h_h < 0 or h_v < 0 or h_g < 0:
        raise ValueError("hop counts must be nonnegative")
    if h_h + h_v > MAX_EXACT_HOPS:
        raise EnumerationBound(
            f"h_h + h_v = {h_h + h_v} exceeds the exact bound {MAX_EXACT_HOPS}; "
            "use survival_ours_mc"
        )
    sgl = links.r ** h_g
    if h_h == 0 or h_v == 0:
        return links.p ** h_h * links.q ** h_v * sgl
    n_paths = math.comb(h_h + h_v, h_v)
    if n_paths <= MAX_INCLUSION_EXCLUSION_PATHS:
        paths, n_h_edges, n_edges = _lattice_paths(h_h, h_v)
        union = _union_inclusion_exclusion(paths, n_h_edges, n_edges, links.p, links.q)
    else:
        union = _union_frontier_dp(h_h, h_v, links.p, links.q)
    return union * sgl


def survival_ours_mc(h_h: int, h_v: int, h_g: int, links: LinkAvailability,
                     samples: int = 1_000_000, seed: int = 0) -> float:
    """Seeded Monte-Carlo estimate of survival_ours for any size."""
    union = lattice_survival_mc(h_h, h_v, links.p, links.q, samples, seed)
    return union * links.r ** h_g


def path_count(h_h: int, h_v: int) -> int:
    """Number of admissible minimum-hop paths."""
    return math.comb(h_h + h_v, h_v)


def complexity_ratio(num_relays: int, gateways_per_relay: float, num_sats: int) -> float:
    """Cost ratio of full-graph estimation over key-node-graph estimation.

    Numerator: gateway search over all satellites, edge generation, and a
    quadratic shortest path on the full graph.  Denominator: the same three
    steps on the key-node graph.
    """
    k, x, s = num_relays, gateways_per_relay, num_sats
    full = k * s + k * x * (x - 1) / 2.0 + s * s
    reduced = (k + 0.5) * k * x * x + 5.5 * k * x
    return full / reduced


@dataclass(frozen=True)
class MinHopEqualityInputs:
    """Constellation quantities for the shortest-distance vs minimum-hop check."""

    num_orbits: int
    sats_per_orbit: int
    phasing_factor: int
    l_v: float
    l_hmin: float

    @property
    def z(self) -> int:
        """Row displacement a full horizontal wrap induces, folded to <= M/2."""
        rem = self.phasing_factor % self.sats_per_orbit
        return rem if rem <= self.sats_per_orbit // 2 else self.sats_per_orbit - rem

    @property
    def max_vertical_swap(self) -> int:
        return min(self.z, self.num_orbits // 2 - 1)

    @property
    def max_horizontal_swap(self) -> int:
        return min(self.z - 1, self.num_orbits // 2)

    @classmethod
    def from_config(cls, config: WalkerDeltaConfig) -> "MinHopEqualityInputs":
        lengths = link_lengths(config)
        return cls(
            num_orbits=config.num_orbits,
            sats_per_orbit=config.sats_per_orbit,
            phasing_factor=config.phasing_factor,
            l_v=lengths["L_v"],
            l_hmin=lengths["L_hmin"],
        )


def minhop_equals_shortest(inputs: MinHopEqualityInputs) -> dict[str, bool]:
    """Sufficient conditions for shortest-distance paths to be minimum-hop.

    Case 1 rules out trading extra horizontal hops for fewer vertical ones;
    case 2 rules out the reverse trade.  Both holding means the hop count of
    the shortest-distance path equals the minimum.  A non-positive swap
    budget makes the corresponding trade impossible, so that case holds
    trivially.
    """
    hv_max = inputs.max_vertical_swap
    hh_max = inputs.max_horizontal_swap
    case1 = True if hv_max <= 0 else inputs.l_hmin > hv_max / (hv_max + 1.0) * inputs.l_v
    case2 = True if hh_max <= 0 else inputs.l_v > hh_max / (hh_max + 1.0) * inputs.l_hmin
    return {"case1_holds": case1, "case2_holds": case2, "both": case1 and case2}
