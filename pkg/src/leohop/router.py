"""Per-node forwarding decisions: inter-satellite, satellite-terrestrial,
and terrestrial-satellite modes under queue-load thresholds.

Decisions are pure functions of the packet's remaining hop budget and the
locally visible queue state; the simulator serializes them in node-id order
within a tick.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .rtpg import GridSnapshot

log = logging.getLogger(__name__)


class Axis(Enum):
    HORIZONTAL = "h"
    VERTICAL = "v"


@dataclass(frozen=True)
class QueueState:
    """Queue loads relevant to one inter-satellite decision, in bits.

    ``next_h``/``next_v`` are the neighbor aggregates: the mean of the two
    candidate-direction send queues of the satellite one hop away in the
    respective direction.
    """

    q_h: float
    q_v: float
    next_h: float
    next_v: float
    buffer_bits: float


def neighbor_aggregate(q_cand_h: float, q_cand_v: float) -> float:
    """Load figure for a next-hop satellite: mean of its two candidate queues."""
    return (q_cand_h + q_cand_v) / 2.0


@dataclass(frozen=True)
class RoutingParams:
    """Forwarding strategy constants (rates in bits/s, tau in seconds)."""

    eta1: float = 0.01
    eta2: float = 2.0
    eta3: float = 1.0
    eta4: float = 2.0
    eta5: float = 1.0
    n0: int = 4
    tau: float = 1e-3
    rate_isl: float = 25e6
    rate_sgl_up: float = 2e9
    rate_sgl_down: float = 1.5e9

    def __post_init__(self):
        if min(self.rate_isl, self.rate_sgl_up, self.rate_sgl_down) <= 0:
            raise ValueError("link rates must be positive")
        if self.n0 < 0:
            raise ValueError("max gateway column offset must be >= 0")


def delay_costs(queues: QueueState, rate_isl: float) -> tuple[float, float]:
    """Potential queuing delay of the two candidate directions, seconds."""
    t_h = (queues.q_h + queues.next_h) / rate_isl
    t_v = (queues.q_v + queues.next_v) / rate_isl
    return t_h, t_v


def gamma_threshold(t_h: float, t_v: float, buffer_bits: float, rate_isl: float,
                    eta1: float) -> float:
    """Tolerance band from the remaining queue space."""
    return eta1 * (2.0 * buffer_bits / rate_isl - max(t_h, t_v))


def decide_intersat(rem_h: int, rem_v: int, queues: QueueState,
                    params: RoutingParams) -> Axis:
    """Choose the horizontal or vertical candidate direction for one forward.

    Order of rules: a direction with zero remaining hops is never chosen; a
    saturated candidate (own or next-hop queue at the buffer bound) is
    avoided when the other is clear; otherwise the delay costs are compared
    against the tolerance band, biased by which direction has the smaller
    remaining budget.  With both candidates saturated the cost comparison
    decides and the overflow rules downstream handle the consequences.
    """
    if rem_h + rem_v < 1:
        raise ValueError("no remaining hops in either direction")
    if rem_h == 0:
        return Axis.VERTICAL
    if rem_v == 0:
        return Axis.HORIZONTAL

    bs = queues.buffer_bits
    h_saturated = queues.q_h >= bs or queues.next_h >= bs
    v_saturated = queues.q_v >= bs or queues.next_v >= bs
    if h_saturated and not v_saturated:
        return Axis.VERTICAL
    if v_saturated and not h_saturated:
        return Axis.HORIZONTAL

    t_h, t_v = delay_costs(queues, params.rate_isl)
    gamma = gamma_threshold(t_h, t_v, bs, params.rate_isl, params.eta1)
    if rem_h <= rem_v:
        choice = Axis.VERTICAL if t_h - t_v <= gamma else Axis.HORIZONTAL
        if rem_h == rem_v:
            log.debug("tie rem_h=rem_v=%d: branch h<=v chose %s", rem_h, choice.value)
        return choice
    return Axis.VERTICAL if t_v - t_h > gamma else Axis.HORIZONTAL


def psi_thresholds(params: RoutingParams) -> tuple[float, float]:
    """Downlink and uplink diversion thresholds, bits."""
    psi_down = params.eta2 * params.tau * params.rate_isl \
        + params.eta3 * params.tau * params.rate_sgl_down
    psi_up = params.eta4 * params.tau * params.rate_isl \
        + params.eta5 * params.tau * params.rate_sgl_up
    return psi_down, psi_up


def column_distance(p_a: int, p_b: int, num_orbits: int) -> int:
    """Cyclic distance between two column coordinates."""
    d = (p_a - p_b) % num_orbits
    return min(d, num_orbits - d)


@dataclass(frozen=True)
class SatTerrestrialDecision:
    """Outcome at a gateway holding a relay-crossing leg."""

    forward_to_relay: bool
    divert_gateway: int | None = None


def decide_sat_terrestrial(
    current_gateway: int,
    relay_id: int,
    gateway_sets: dict[int, list[int]],
    downlink_load,
    params: RoutingParams,
    snapshot: GridSnapshot,
) -> SatTerrestrialDecision:
    """Forward down to the relay, or divert to a less-loaded sibling gateway.

    ``downlink_load`` maps a gateway id to the bits queued on its downlink
    toward ``relay_id``.  Diversion picks the lightest-loaded gateway within
    the column-offset bound, requires it to be strictly lighter than the
    current one (otherwise diverting cannot help and may ping-pong), and
    falls back to the relay when no candidate qualifies.
    """
    psi_down, _ = psi_thresholds(params)
    own = downlink_load(current_gateway)
    if own <= psi_down:
        return SatTerrestrialDecision(forward_to_relay=True)
    p_here = int(snapshot.P[current_gateway - 1])
    best = None
    best_load = own
    # gateway lists are sorted, so the first strict minimum is the lowest id
    for sat in gateway_sets.get(relay_id, ()):
        if sat == current_gateway:
            continue
        if column_distance(p_here, int(snapshot.P[sat - 1]), snapshot.config.num_orbits) > params.n0:
            continue
        load = downlink_load(sat)
        if load < best_load:
            best = sat
            best_load = load
    if best is None:
        return SatTerrestrialDecision(forward_to_relay=True)
    return SatTerrestrialDecision(forward_to_relay=False, divert_gateway=best)


@dataclass(frozen=True)
class TerrestrialSatDecision:
    """Outcome at a relay: which gateway receives the uplink."""

    gateway: int
    replan: bool  # True when the planned gateway was bypassed (header rebuild)


def decide_terrestrial_sat(
    relay_id: int,
    planned_gateway: int,
    gateway_sets: dict[int, list[int]],
    uplink_load,
    params: RoutingParams,
    snapshot: GridSnapshot,
) -> TerrestrialSatDecision:
    """Uplink to the planned gateway, or to the lightest-loaded alternate.

    If the planned gateway left coverage, the lightest-loaded gateway of the
    relay takes over regardless of column offset.  Either replacement means
    the receiving gateway must rebuild the packet's route.
    """
    members = gateway_sets.get(relay_id, [])
    if not members:
        raise ValueError(f"relay {relay_id} has no gateways")
    _, psi_up = psi_thresholds(params)

    def lightest(candidates) -> int | None:
        best, best_load = None, None
        for sat in candidates:  # sorted, so ties resolve to the lowest id
            load = uplink_load(sat)
            if best is None or load < best_load:
                best, best_load = sat, load
        return best

    if planned_gateway not in members:
        return TerrestrialSatDecision(gateway=lightest(members), replan=True)
    if uplink_load(planned_gateway) <= psi_up:
        return TerrestrialSatDecision(gateway=planned_gateway, replan=False)
    p_planned = int(snapshot.P[planned_gateway - 1])
    near = [
        sat for sat in members
        if column_distance(int(snapshot.P[sat - 1]), p_planned, snapshot.config.num_orbits)
        <= params.n0
    ]
    chosen = lightest(near) if near else planned_gateway
    if chosen is None or chosen == planned_gateway:
        return TerrestrialSatDecision(gateway=planned_gateway, replan=False)
    return TerrestrialSatDecision(gateway=chosen, replan=True)
