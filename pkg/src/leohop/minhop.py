"""O(1) minimum hop-count estimation between satellites over the ISL mesh.

Works purely on grid coordinates: horizontal hop counts from the column
difference, a row-shift correction for the phase offset accumulated across
orbits, and vertical hop counts from the corrected row difference.  The
best of the four direction combinations is the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .constellation import WalkerDeltaConfig
from .rtpg import PHASE_WINDOW_START, GridSnapshot, floor_index


class Direction(IntEnum):
    """Candidate direction pair; the value doubles as the 2-bit wire code."""

    TOP_RIGHT = 0
    BOTTOM_RIGHT = 1
    TOP_LEFT = 2
    BOTTOM_LEFT = 3

    @property
    def rightward(self) -> bool:
        return self in (Direction.TOP_RIGHT, Direction.BOTTOM_RIGHT)

    @property
    def upward(self) -> bool:
        return self in (Direction.TOP_RIGHT, Direction.TOP_LEFT)


@dataclass(frozen=True)
class HopEstimate:
    """Minimum hop count with its direction and horizontal/vertical split."""

    h_min: int
    direction: Direction
    h_h: int
    h_v: int


def horizontal_hops(p1: int, p2: int, num_orbits: int) -> tuple[int, int]:
    """Hops needed rightward and leftward between columns p1 and p2.

    h_right + h_left is 0 when the columns match and N otherwise.
    """
    h_right = (num_orbits - (p1 - p2)) % num_orbits
    h_left = (num_orbits + (p1 - p2)) % num_orbits
    return h_right, h_left


def r_shift(h_h: int, r1: int, u1_norm: float, rightward: bool,
            config: WalkerDeltaConfig, source_orbit: int | None = None) -> int:
    """Row reached after h_h inter-orbit hops starting from row r1.

    Each rightward hop adds delta_f to the phase, each leftward hop
    subtracts it.  The row advances when the accumulated offset crosses the
    source row's boundary, measured relative to the source phase; the count
    of crossed boundaries follows from the offset of the source phase inside
    its row.

    The inter-orbit link closing the pattern (highest orbit back to the
    first) carries a phase jump of -N*delta_f on top of the regular step,
    which is exactly F rows.  A traversal that wraps past that seam must be
    corrected by F rows, so callers that know the source orbit (1-based)
    should pass it; without it the plain per-hop accumulation is used and
    seam-crossing traversals come out wrong.
    """
    if h_h == 0 or config.phasing_factor == 0:
        return r1
    offset_in_row = (u1_norm - PHASE_WINDOW_START) - r1 * config.delta_phi
    signed = h_h * config.delta_f if rightward else -h_h * config.delta_f
    shift = floor_index((offset_in_row + signed) / config.delta_phi)
    if source_orbit is not None:
        if rightward and source_orbit - 1 + h_h >= config.num_orbits:
            shift -= config.phasing_factor
        elif not rightward and source_orbit - 1 - h_h < 0:
            shift += config.phasing_factor
    return (r1 + shift) % config.sats_per_orbit


def vertical_hops(r_target: int, r_shifted: int, sats_per_orbit: int) -> tuple[int, int]:
    """Hops needed upward and downward between rows; they sum to 0 or M."""
    h_up = (sats_per_orbit + (r_target - r_shifted)) % sats_per_orbit
    h_down = (sats_per_orbit - (r_target - r_shifted)) % sats_per_orbit
    return h_up, h_down


def estimate_from_coords(
    p1: int, r1: int, u1_norm: float, p2: int, r2: int, config: WalkerDeltaConfig,
    source_orbit: int | None = None,
) -> HopEstimate:
    """Estimate between two grid coordinates (see estimate_min_hops)."""
    h_right, h_left = horizontal_hops(p1, p2, config.num_orbits)
    rr = r_shift(h_right, r1, u1_norm, True, config, source_orbit)
    rl = r_shift(h_left, r1, u1_norm, False, config, source_orbit)
    up_r, down_r = vertical_hops(r2, rr, config.sats_per_orbit)
    up_l, down_l = vertical_hops(r2, rl, config.sats_per_orbit)
    # fixed tie-break order: TR, BR, TL, BL
    candidates = (
        (h_right + up_r, h_right, up_r),
        (h_right + down_r, h_right, down_r),
        (h_left + up_l, h_left, up_l),
        (h_left + down_l, h_left, down_l),
    )
    best = 0
    for k in range(1, 4):
        if candidates[k][0] < candidates[best][0]:
            best = k
    total, h_h, h_v = candidates[best]
    return HopEstimate(total, Direction(best), h_h, h_v)


def estimate_min_hops(src: int, dst: int, snapshot: GridSnapshot,
                      config: WalkerDeltaConfig) -> HopEstimate:
    """Minimum end-to-end ISL hop count between two satellites (flat ids).

    Evaluates the four direction combinations and returns the minimizer,
    resolving ties in the fixed order top-right, bottom-right, top-left,
    bottom-left.  src == dst yields a zero estimate.
    """
    if src == dst:
        return HopEstimate(0, Direction.TOP_RIGHT, 0, 0)
    i, j = src - 1, dst - 1
    return estimate_from_coords(
        int(snapshot.P[i]), int(snapshot.R[i]), float(snapshot.u_norm[i]),
        int(snapshot.P[j]), int(snapshot.R[j]), config,
        source_orbit=i // config.sats_per_orbit + 1,
    )


def estimate_many(src: int, dst: np.ndarray, snapshot: GridSnapshot,
                  config: WalkerDeltaConfig) -> np.ndarray:
    """Vectorized h_min from one source to many destinations (flat ids).

    Returns an int array aligned with ``dst``.  Matches estimate_min_hops
    exactly; used for bulk edge generation and validation sweeps.
    """
    dst = np.asarray(dst, dtype=np.int64)
    i = src - 1
    p1 = int(snapshot.P[i])
    r1 = int(snapshot.R[i])
    u1 = float(snapshot.u_norm[i])
    orbit0 = i // config.sats_per_orbit  # 0-based source orbit
    nn, mm = config.num_orbits, config.sats_per_orbit
    p2 = snapshot.P[dst - 1]
    r2 = snapshot.R[dst - 1]
    h_right = (p2 - p1) % nn
    h_left = (p1 - p2) % nn
    offset = (u1 - PHASE_WINDOW_START) - r1 * config.delta_phi
    if config.phasing_factor == 0:
        rr = np.full(dst.shape, r1, dtype=np.int64)
        rl = rr
    else:
        ff = config.phasing_factor
        wrap_r = np.where(orbit0 + h_right >= nn, ff, 0)
        wrap_l = np.where(orbit0 - h_left < 0, ff, 0)
        shift_r = floor_index((offset + h_right * config.delta_f) / config.delta_phi) - wrap_r
        shift_l = floor_index((offset - h_left * config.delta_f) / config.delta_phi) + wrap_l
        rr = np.where(h_right == 0, r1, (r1 + shift_r) % mm)
        rl = np.where(h_left == 0, r1, (r1 + shift_l) % mm)
    up_r = (r2 - rr) % mm
    down_r = (rr - r2) % mm
    up_l = (r2 - rl) % mm
    down_l = (rl - r2) % mm
    totals = np.stack(
        [h_right + up_r, h_right + down_r, h_left + up_l, h_left + down_l]
    )
    out = totals.min(axis=0)
    out[dst == src] = 0
    return out
