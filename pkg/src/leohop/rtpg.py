"""Real-time position grid (RTPG): the 2D region abstraction of the constellation.

The earth's surface is divided into an N x M grid.  Columns follow the
ascending-node longitude in steps of delta_omega; rows follow the orbital
phase in steps of delta_phi, counted in a window that starts at phase pi/2.
At any instant every region holds exactly one satellite, so each satellite
gets integer coordinates (P, R) that mirror its orbit slot and phase slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .constellation import (
    ConfigError,
    Ephemeris,
    SatelliteId,
    WalkerDeltaConfig,
    lon_offset_from_node,
    propagate,
)

# Tolerance (in region-index units) for snapping values that sit on a region
# boundary up to float noise.  Walker phasing puts satellites exactly on
# boundaries for some (N, M, F, t) combinations; the snap keeps independent
# computations of the same index consistent.
BOUNDARY_SNAP = 1e-9

PHASE_WINDOW_START = math.pi / 2


class BijectionError(RuntimeError):
    """Two satellites mapped to one region (broken config or boundary collision)."""


class RegionCoord(NamedTuple):
    P: int
    R: int


def floor_index(x, snap: float = BOUNDARY_SNAP):
    """floor(x) with values within ``snap`` of an integer snapped first.

    Half-open convention: a value exactly on a boundary belongs to the
    region whose lower edge it is.
    """
    arr = np.asarray(x, dtype=float)
    nearest = np.rint(arr)
    snapped = np.where(np.abs(arr - nearest) < snap, nearest, arr)
    out = np.floor(snapped).astype(np.int64)
    if np.ndim(x) == 0:
        return int(out)
    return out


def region_boundaries(P: int, R: int, config: WalkerDeltaConfig) -> dict[str, float]:
    """Geodetic and phase boundaries of region (P, R).

    Longitudes span one node-longitude step.  Latitude bounds map the two
    phase edges through the inclination (for rows on the descending side the
    numeric order of lower/upper flips).  Phase bounds are expressed inside
    the [pi/2, pi/2 + 2*pi) window actually used for row indexing.
    """
    if not 0 <= P < config.num_orbits:
        raise ConfigError(f"P={P} outside 0..{config.num_orbits - 1}")
    if not 0 <= R < config.sats_per_orbit:
        raise ConfigError(f"R={R} outside 0..{config.sats_per_orbit - 1}")
    mm = config.sats_per_orbit
    sin_a = math.sin(config.inclination_rad)
    two_pi_m = 2.0 * math.pi / mm
    phi_lower = math.asin(sin_a * math.sin(math.pi / 2 - two_pi_m * (mm - R)))
    phi_upper = math.asin(sin_a * math.sin(math.pi / 2 - two_pi_m * (mm - R - 1)))
    return {
        "lambda_left": P * config.delta_omega,
        "lambda_right": (P + 1) * config.delta_omega,
        "phi_lower": phi_lower,
        "phi_upper": phi_upper,
        "u_lower": PHASE_WINDOW_START + R * config.delta_phi,
        "u_upper": PHASE_WINDOW_START + (R + 1) * config.delta_phi,
    }


def satellite_phase(lat: float, ascending: bool, inclination_rad: float,
                    tol: float = 1e-9) -> float:
    """Recover orbital phase in (-pi, pi] from latitude and motion direction.

    Ascending: u = arcsin(sin(lat)/sin(alpha)).  Descending: u = sign(lat)*pi
    minus that arcsin; at lat exactly 0 the sign is degenerate and the
    descending equator crossing resolves to +pi (the representable one in
    the (-pi, pi] range, and where a descending satellite actually sits).
    """
    ratio = math.sin(lat) / math.sin(inclination_rad)
    if abs(ratio) > 1.0 + tol:
        raise ConfigError(f"latitude {lat} exceeds inclination band")
    ratio = min(1.0, max(-1.0, ratio))
    base = math.asin(ratio)
    if ascending:
        return base
    if lat == 0.0:
        return math.pi
    return math.copysign(math.pi, lat) - base


def ascending_node_longitude(lon: float, phase: float, ascending: bool,
                             inclination_rad: float) -> float:
    """Ascending-node longitude L = mod(lon - xi(phase), 2*pi).

    The quadrant-aware xi already carries the descending half-turn, so the
    ``ascending`` flag only documents the caller's branch choice.
    """
    del ascending  # branch is encoded in the phase itself
    return math.fmod(lon - lon_offset_from_node(phase, inclination_rad), 2.0 * math.pi) % (
        2.0 * math.pi
    )


def normalized_phase(phase):
    """Shift phase from (-pi, pi] into the row window [pi/2, pi/2 + 2*pi)."""
    arr = np.asarray(phase, dtype=float)
    out = np.where(arr < PHASE_WINDOW_START, arr + 2.0 * math.pi, arr)
    if np.ndim(phase) == 0:
        return float(out)
    return out


def region_coords(node_lon, phase, config: WalkerDeltaConfig):
    """Region coordinates (P, R) from node longitude and phase.

    P = floor(L / delta_omega) mod N; R = floor((u' - pi/2) / delta_phi) mod M
    with u' the phase shifted into the row window.
    """
    p = np.mod(floor_index(np.asarray(node_lon, float) / config.delta_omega),
               config.num_orbits)
    u_norm = normalized_phase(phase)
    r = np.mod(
        floor_index((np.asarray(u_norm, float) - PHASE_WINDOW_START) / config.delta_phi),
        config.sats_per_orbit,
    )
    if np.ndim(node_lon) == 0 and np.ndim(phase) == 0:
        return RegionCoord(int(p), int(r))
    return p, r


@dataclass
class GridSnapshot:
    """One-satellite-per-region map of the constellation at a fixed time.

    Arrays are indexed by flat satellite id minus one.  ``region_to_sat``
    maps (P, R) to the flat id of its occupant; the inverse mapping lives in
    the P/R arrays.  Immutable by convention after construction.
    """

    t: float
    config: WalkerDeltaConfig = field(repr=False)
    P: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    u_norm: np.ndarray = field(repr=False)
    lat: np.ndarray = field(repr=False)
    lon: np.ndarray = field(repr=False)
    ascending: np.ndarray = field(repr=False)
    region_to_sat: dict[RegionCoord, int] = field(repr=False)

    def region_of(self, flat_id: int) -> RegionCoord:
        return RegionCoord(int(self.P[flat_id - 1]), int(self.R[flat_id - 1]))

    def sat_in_region(self, region: RegionCoord) -> int | None:
        return self.region_to_sat.get(RegionCoord(*region))

    def unit_vectors(self) -> np.ndarray:
        cl = np.cos(self.lat)
        return np.stack(
            [cl * np.cos(self.lon), cl * np.sin(self.lon), np.sin(self.lat)], axis=1
        )

    def dump_text(self) -> str:
        """Diagnostic dump, one line per region: P R flat_id lat_deg lon_deg."""
        lines = ["P,R,sat,lat_deg,lon_deg"]
        for (p, r), sat in sorted(self.region_to_sat.items()):
            lines.append(
                f"{p},{r},{sat},{math.degrees(self.lat[sat - 1]):.6f},"
                f"{math.degrees(self.lon[sat - 1]):.6f}"
            )
        return "\n".join(lines) + "\n"


def build_snapshot(eph: Ephemeris, config: WalkerDeltaConfig) -> GridSnapshot:
    """Map every satellite to its region; raise BijectionError on collision."""
    node_lon_full = np.repeat(eph.node_lon, config.sats_per_orbit)
    p, r = region_coords(node_lon_full, eph.phase, config)
    region_to_sat: dict[RegionCoord, int] = {}
    for i in range(config.total_sats):
        key = RegionCoord(int(p[i]), int(r[i]))
        other = region_to_sat.get(key)
        if other is not None:
            raise BijectionError(
                f"region {key} claimed by satellites {other} and {i + 1} at t={eph.t}"
            )
        region_to_sat[key] = i + 1
    return GridSnapshot(
        t=eph.t,
        config=config,
        P=p,
        R=r,
        u_norm=normalized_phase(eph.phase),
        lat=eph.lat,
        lon=eph.lon,
        ascending=eph.ascending,
        region_to_sat=region_to_sat,
    )


def snapshot_at(config: WalkerDeltaConfig, t: float) -> GridSnapshot:
    """Propagate the default Walker layout to time t and grid it."""
    return build_snapshot(propagate(config, t), config)
