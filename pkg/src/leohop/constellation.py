"""Walker Delta constellation geometry: satellite motion, ISL topology, ground relays.

The constellation is an ideal Walker Delta: N circular orbits with the same
inclination, evenly spaced in ascending-node longitude, M satellites per
orbit evenly spaced in phase, and a fixed inter-orbit phase offset set by
the phasing factor F.  Propagation is analytic (uniform phase advance plus
ascending-node regression from earth rotation); no perturbations.

All angles are radians internally.  Degrees appear only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

EARTH_RADIUS_KM = 6371.0
EARTH_ROTATION_RAD_S = 7.2921159e-5
# standard gravitational parameter of the earth, km^3/s^2
MU_EARTH = 398600.4418
SPEED_OF_LIGHT_KM_S = 299792.458


class ConfigError(ValueError):
    """Raised for constellation or scenario parameters that violate invariants."""


class SatelliteId(NamedTuple):
    """Satellite position in the grid of orbits: orbit n in 1..N, index m in 1..M."""

    orbit: int
    index: int


@dataclass(frozen=True)
class WalkerDeltaConfig:
    """Walker Delta parameters and derived constants.

    num_orbits, sats_per_orbit and phasing_factor are the classic N/M/F
    triple; altitude_km and inclination_rad complete the shell.  omega_s
    defaults to the circular-orbit angular velocity for the altitude.
    """

    num_orbits: int
    sats_per_orbit: int
    phasing_factor: int
    altitude_km: float
    inclination_rad: float
    omega_s: float = 0.0
    omega_e: float = EARTH_ROTATION_RAD_S
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if self.num_orbits < 1:
            raise ConfigError("need at least one orbit")
        if self.sats_per_orbit < 3:
            raise ConfigError("need at least three satellites per orbit")
        if not 0.0 < self.inclination_rad < math.pi / 2:
            raise ConfigError("inclination must be acute (0, pi/2)")
        if not 0 <= self.phasing_factor < self.num_orbits * self.sats_per_orbit:
            raise ConfigError("phasing factor must satisfy 0 <= F < N*M")
        if self.altitude_km <= 0:
            raise ConfigError("altitude must be positive")
        if self.omega_s == 0.0:
            object.__setattr__(self, "omega_s", math.sqrt(MU_EARTH / self.orbit_radius_km**3))

    @property
    def orbit_radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    @property
    def total_sats(self) -> int:
        return self.num_orbits * self.sats_per_orbit

    @property
    def delta_omega(self) -> float:
        """Ascending-node longitude spacing between adjacent orbits."""
        return 2.0 * math.pi / self.num_orbits

    @property
    def delta_phi(self) -> float:
        """Phase spacing between neighboring satellites in one orbit."""
        return 2.0 * math.pi / self.sats_per_orbit

    @property
    def delta_f(self) -> float:
        """Phase offset between satellites joined by an inter-orbit link."""
        return 2.0 * math.pi * self.phasing_factor / (self.num_orbits * self.sats_per_orbit)

    @property
    def orbit_period_s(self) -> float:
        return 2.0 * math.pi / self.omega_s

    @property
    def earth_period_s(self) -> float:
        return 2.0 * math.pi / self.omega_e

    # flat ids are 1-based: i = (n-1)*M + m
    def flat_id(self, sat: SatelliteId) -> int:
        n, m = sat
        if not (1 <= n <= self.num_orbits and 1 <= m <= self.sats_per_orbit):
            raise ConfigError(f"satellite ({n},{m}) outside constellation")
        return (n - 1) * self.sats_per_orbit + m

    def sat_from_flat(self, i: int) -> SatelliteId:
        if not 1 <= i <= self.total_sats:
            raise ConfigError(f"flat id {i} outside 1..{self.total_sats}")
        return SatelliteId((i - 1) // self.sats_per_orbit + 1, (i - 1) % self.sats_per_orbit + 1)

    def initial_phase(self, sat: SatelliteId) -> float:
        """Phase of satellite m in orbit n at t=0 under Walker spacing."""
        n, m = sat
        return (m - 1) * self.delta_phi + (n - 1) * self.delta_f

    def initial_node_longitude(self, orbit: int) -> float:
        return (orbit - 1) * self.delta_omega


@dataclass(frozen=True)
class SatelliteState:
    """Instantaneous geodetic state of one satellite."""

    lat: float
    lon: float
    phase: float
    ascending: bool


@dataclass(frozen=True)
class GroundRelay:
    """Terrestrial relay node used as a routing shortcut (not a traffic endpoint)."""

    relay_id: int
    lat: float
    lon: float
    min_elevation: float = math.radians(40.0)

    def __post_init__(self):
        if not abs(self.lat) < math.pi / 2:
            raise ConfigError("relay latitude must be strictly inside (-pi/2, pi/2)")
        if not 0.0 < self.min_elevation < math.pi / 2:
            raise ConfigError("minimum elevation must be in (0, pi/2)")


@dataclass
class Ephemeris:
    """Vectorized state of all satellites at one instant.

    Arrays are indexed by flat id minus one.  ``node_lon`` is per-orbit
    (length N).  ``phase`` is normalized to (-pi, pi].
    """

    t: float
    phase: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    ascending: np.ndarray
    node_lon: np.ndarray
    config: WalkerDeltaConfig = field(repr=False)

    def state(self, i: int) -> SatelliteState:
        return SatelliteState(
            lat=float(self.lat[i - 1]),
            lon=float(self.lon[i - 1]),
            phase=float(self.phase[i - 1]),
            ascending=bool(self.ascending[i - 1]),
        )

    def unit_vectors(self) -> np.ndarray:
        """Earth-fixed unit vectors of the sub-satellite points, shape (S, 3)."""
        cl = np.cos(self.lat)
        return np.stack(
            [cl * np.cos(self.lon), cl * np.sin(self.lon), np.sin(self.lat)], axis=1
        )


def wrap_pi(x):
    """Wrap angle(s) to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, 2.0 * math.pi)
    y = np.where(y == 0.0, 2.0 * math.pi, y) - math.pi
    if np.ndim(x) == 0:
        return float(y)
    return y


def lon_offset_from_node(phase, inclination_rad: float):
    """Longitude offset from the ascending node to a satellite at the given phase.

    Uses a quadrant-aware arctangent so the descending branch picks up its
    half-turn continuously instead of hitting the tangent singularity at
    phase +/- pi/2.
    """
    cos_a = math.cos(inclination_rad)
    out = np.arctan2(cos_a * np.sin(phase), np.cos(phase))
    if np.ndim(phase) == 0:
        return float(out)
    return out


def propagate(
    config: WalkerDeltaConfig,
    t: float,
    initial_phases: np.ndarray | None = None,
    initial_node_lons: np.ndarray | None = None,
) -> Ephemeris:
    """Analytic state of the whole constellation at time t (seconds, t >= 0).

    Phase advances at omega_s; ascending-node longitude regresses at the
    earth rotation rate.  Defaults reproduce the Walker Delta spacing:
    u0(n, m) = (m-1)*delta_phi + (n-1)*delta_f and L0(n) = (n-1)*delta_omega.
    """
    nn, mm = config.num_orbits, config.sats_per_orbit
    if initial_phases is None:
        orbit_idx = np.repeat(np.arange(nn), mm)
        sat_idx = np.tile(np.arange(mm), nn)
        initial_phases = sat_idx * config.delta_phi + orbit_idx * config.delta_f
    if initial_node_lons is None:
        initial_node_lons = np.arange(nn) * config.delta_omega

    phase = wrap_pi(initial_phases + config.omega_s * t)
    node_lon = np.mod(initial_node_lons - config.omega_e * t, 2.0 * math.pi)
    sin_a = math.sin(config.inclination_rad)
    lat = np.arcsin(np.clip(sin_a * np.sin(phase), -1.0, 1.0))
    lon = np.mod(np.repeat(node_lon, mm) + lon_offset_from_node(phase, config.inclination_rad),
                 2.0 * math.pi)
    # half-open convention: ascending iff phase in [-pi/2, pi/2)
    ascending = (phase >= -math.pi / 2) & (phase < math.pi / 2)
    return Ephemeris(t=t, phase=phase, lat=lat, lon=lon, ascending=ascending,
                     node_lon=node_lon, config=config)


def isl_neighbors(sat: SatelliteId, config: WalkerDeltaConfig) -> tuple[SatelliteId, ...]:
    """Four permanent ISL neighbors: (intra-up, intra-down, inter-left, inter-right).

    Intra-orbit neighbors are the adjacent phase indices; inter-orbit links
    pair equal indices in adjacent orbits.  The relation is symmetric and
    the resulting graph is 4-regular with 2*N*M edges.
    """
    n, m = sat
    nn, mm = config.num_orbits, config.sats_per_orbit
    up = SatelliteId(n, m % mm + 1)
    down = SatelliteId(n, (m - 2) % mm + 1)
    left = SatelliteId((n - 2) % nn + 1, m)
    right = SatelliteId(n % nn + 1, m)
    return up, down, left, right


def elevation_angle(relay: GroundRelay, sat: SatelliteState, config: WalkerDeltaConfig) -> float:
    """Elevation of the satellite above the relay's local horizon.

    Standard spherical triangle between earth center, relay, and satellite:
    tan(el) = (cos(sigma) - r_e/r_s) / sin(sigma) with sigma the central
    angle between the relay and the sub-satellite point.
    """
    cos_sigma = (
        math.sin(relay.lat) * math.sin(sat.lat)
        + math.cos(relay.lat) * math.cos(sat.lat) * math.cos(relay.lon - sat.lon)
    )
    cos_sigma = min(1.0, max(-1.0, cos_sigma))
    sin_sigma = math.sqrt(1.0 - cos_sigma * cos_sigma)
    ratio = config.earth_radius_km / config.orbit_radius_km
    return math.atan2(cos_sigma - ratio, sin_sigma)


def coverage_angle(min_elevation: float, config: WalkerDeltaConfig) -> float:
    """Central angle below which a satellite clears the given elevation mask.

    From the same triangle: gamma = arcsin(r_e * sin(theta + pi/2) / (r_e + h))
    and the visibility threshold is beta = pi/2 - theta - gamma.
    """
    gamma = math.asin(
        config.earth_radius_km * math.sin(min_elevation + math.pi / 2) / config.orbit_radius_km
    )
    return math.pi / 2 - min_elevation - gamma


def link_lengths(config: WalkerDeltaConfig) -> dict[str, float]:
    """Chord lengths of the two ISL families, in km.

    Intra-orbit links have the constant length L_v.  Inter-orbit link length
    varies with phase; L_hmin is its minimum, from the closed form built on
    the inter-orbit geometry angles gamma and kappa.
    """
    r = config.orbit_radius_km
    l_v = 2.0 * math.sin(math.pi / config.sats_per_orbit) * r
    sin_a = math.sin(config.inclination_rad)
    two_pi_n = 2.0 * math.pi / config.num_orbits
    s2 = (sin_a * math.sin(two_pi_n)) ** 2
    gamma = math.acos(1.0 - s2 / (1.0 + math.cos(two_pi_n)))
    kappa = math.asin(
        math.sqrt((1.0 + math.cos(two_pi_n)) ** 2 / (2.0 + 2.0 * math.cos(two_pi_n) - s2))
    )
    cos_g = math.cos(gamma)
    arg = (1.0 - cos_g) / 2.0 - (1.0 + cos_g) / 2.0 * math.cos(2.0 * kappa - config.delta_f)
    gamma_min = math.acos(min(1.0, max(-1.0, arg)))
    l_hmin = 2.0 * r * math.sin(gamma_min / 2.0)
    return {"L_v": l_v, "L_hmin": l_hmin}


def chord_km(lat1, lon1, lat2, lon2, radius_km: float):
    """Straight-line distance between two points on a sphere of radius_km."""
    cos_sigma = (
        np.sin(lat1) * np.sin(lat2) + np.cos(lat1) * np.cos(lat2) * np.cos(lon1 - lon2)
    )
    cos_sigma = np.clip(cos_sigma, -1.0, 1.0)
    return 2.0 * radius_km * np.sin(np.arccos(cos_sigma) / 2.0)


def slant_range_km(relay: GroundRelay, sat_lat: float, sat_lon: float,
                   config: WalkerDeltaConfig) -> float:
    """Line-of-sight distance from a relay to a satellite at orbit altitude."""
    cos_sigma = (
        math.sin(relay.lat) * math.sin(sat_lat)
        + math.cos(relay.lat) * math.cos(sat_lat) * math.cos(relay.lon - sat_lon)
    )
    cos_sigma = min(1.0, max(-1.0, cos_sigma))
    re = config.earth_radius_km
    rs = config.orbit_radius_km
    return math.sqrt(re * re + rs * rs - 2.0 * re * rs * cos_sigma)
