"""Scenario files: flat key-value text describing one simulation run.

Units: angles in degrees, rates in bits/s, sizes in bits, times in seconds.
Unknown keys are rejected so typos surface immediately; missing required
keys are reported by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .constellation import ConfigError, GroundRelay, WalkerDeltaConfig
from .relay_sites import CALIBRATED_MIN_ELEVATION_DEG, default_relays
from .router import RoutingParams

STRATEGIES = ("OURS", "DSP", "LSP", "DSPCR", "LSPCR")

_REQUIRED = (
    "S", "N", "F", "h_km", "inclination_deg",
    "R_ISL", "R_SGL_up", "R_SGL_down", "B_s", "B_w",
    "flow_count", "R_pac", "strategy",
)

_DEFAULTS = {
    "duration": 20.51,
    "tau": 1e-3,
    "knbg_period": 0.6,
    "seed": 0,
    "forwarding_rate_multiplier": 1,
    "on_mean": 1.0,
    "off_mean": 1.0,
    "packet_size_bits": 12000,
    "eta1": 0.01,
    "eta2": 2.0,
    "eta3": 1.0,
    "eta4": 2.0,
    "eta5": 1.0,
    "N0": 4,
    "relays": "builtin25",
    "min_elevation_deg": CALIBRATED_MIN_ELEVATION_DEG,
}

_NUMERIC_KEYS = set(_REQUIRED) - {"strategy"} | set(_DEFAULTS) - {"relays"}


@dataclass
class ScenarioConfig:
    """Everything one deterministic simulation run needs."""

    constellation: WalkerDeltaConfig
    relays: list[GroundRelay]
    rate_isl: float
    rate_sgl_up: float
    rate_sgl_down: float
    buffer_send_bits: float
    buffer_wait_bits: float
    flow_count: int
    packet_rate_bps: float
    on_mean_s: float
    off_mean_s: float
    packet_size_bits: int
    strategy: str
    duration_s: float = 20.51
    tau_s: float = 1e-3
    knbg_period_s: float = 0.6
    seed: int = 0
    forwarding_rate_multiplier: int = 1
    eta: tuple[float, float, float, float, float] = (0.01, 2.0, 1.0, 2.0, 1.0)
    n0: int = 4
    debug_checks: bool = False
    collect_queue_traces: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.duration_s <= 0 or self.tau_s <= 0:
            raise ConfigError("duration and tau must be positive")
        if min(self.rate_isl, self.rate_sgl_up, self.rate_sgl_down, self.packet_rate_bps) <= 0:
            raise ConfigError("all rates must be positive")
        if self.forwarding_rate_multiplier not in (1, 2):
            raise ConfigError("forwarding_rate_multiplier must be 1 or 2")
        if self.packet_size_bits <= 0:
            raise ConfigError("packet_size_bits must be positive")
        if self.flow_count < 0:
            raise ConfigError("flow_count must be >= 0")

    @property
    def routing_params(self) -> RoutingParams:
        e = self.eta
        return RoutingParams(
            eta1=e[0], eta2=e[1], eta3=e[2], eta4=e[3], eta5=e[4],
            n0=self.n0, tau=self.tau_s,
            rate_isl=self.rate_isl,
            rate_sgl_up=self.rate_sgl_up,
            rate_sgl_down=self.rate_sgl_down,
        )

    @property
    def total_ticks(self) -> int:
        return int(round(self.duration_s / self.tau_s))

    @property
    def knbg_period_ticks(self) -> int:
        return max(1, int(round(self.knbg_period_s / self.tau_s)))


def _parse_number(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse number from {raw!r}") from exc


def parse_scenario_text(text: str) -> ScenarioConfig:
    values: dict[str, str] = {}
    extra_relays: list[tuple[int, float, float, float | None]] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("relay."):
            try:
                rid = int(key.split(".", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad relay key {key!r}") from exc
            parts = value.split()
            if len(parts) not in (2, 3):
                raise ConfigError(
                    f"line {lineno}: relay needs 'lat_deg lon_deg [min_elev_deg]'"
                )
            lat, lon = (float(parts[0]), float(parts[1]))
            elev = float(parts[2]) if len(parts) == 3 else None
            extra_relays.append((rid, lat, lon, elev))
            continue
        if key != "relays" and key != "strategy" and key not in _NUMERIC_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")

    num: dict[str, float] = {}
    for key, default in _DEFAULTS.items():
        if key == "relays":
            continue
        num[key] = _parse_number(key, values[key]) if key in values else float(default)
    for key in _REQUIRED:
        if key in ("strategy",):
            continue
        num[key] = _parse_number(key, values[key])

    total = int(num["S"])
    n_orbits = int(num["N"])
    if n_orbits <= 0 or total % n_orbits != 0:
        raise ConfigError(f"S={total} is not a multiple of N={n_orbits}")
    config = WalkerDeltaConfig(
        num_orbits=n_orbits,
        sats_per_orbit=total // n_orbits,
        phasing_factor=int(num["F"]),
        altitude_km=num["h_km"],
        inclination_rad=math.radians(num["inclination_deg"]),
    )

    min_elev = num["min_elevation_deg"]
    relay_token = values.get("relays", str(_DEFAULTS["relays"])).strip()
    if relay_token == "builtin25":
        relays = default_relays(25, min_elev)
    elif relay_token == "builtin12":
        relays = default_relays(12, min_elev)
    elif relay_token == "none":
        relays = []
    else:
        raise ConfigError(f"key 'relays': expected builtin25|builtin12|none, got {relay_token!r}")
    for rid, lat, lon, elev in sorted(extra_relays):
        if any(r.relay_id == rid for r in relays):
            raise ConfigError(f"relay id {rid} already defined")
        relays.append(
            GroundRelay(
                relay_id=rid,
                lat=math.radians(lat),
                lon=math.radians(lon) % (2 * math.pi),
                min_elevation=math.radians(elev if elev is not None else min_elev),
            )
        )

    return ScenarioConfig(
        constellation=config,
        relays=relays,
        rate_isl=num["R_ISL"],
        rate_sgl_up=num["R_SGL_up"],
        rate_sgl_down=num["R_SGL_down"],
        buffer_send_bits=num["B_s"],
        buffer_wait_bits=num["B_w"],
        flow_count=int(num["flow_count"]),
        packet_rate_bps=num["R_pac"],
        on_mean_s=num["on_mean"],
        off_mean_s=num["off_mean"],
        packet_size_bits=int(num["packet_size_bits"]),
        strategy=values["strategy"].strip(),
        duration_s=num["duration"],
        tau_s=num["tau"],
        knbg_period_s=num["knbg_period"],
        seed=int(num["seed"]),
        forwarding_rate_multiplier=int(num["forwarding_rate_multiplier"]),
        eta=(num["eta1"], num["eta2"], num["eta3"], num["eta4"], num["eta5"]),
        n0=int(num["N0"]),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


def apply_overrides(scenario: ScenarioConfig, overrides: dict[str, float]) -> ScenarioConfig:
    """New scenario with numeric fields replaced; keys use scenario-file names."""
    mapping = {
        "R_ISL": "rate_isl",
        "R_SGL_up": "rate_sgl_up",
        "R_SGL_down": "rate_sgl_down",
        "B_s": "buffer_send_bits",
        "B_w": "buffer_wait_bits",
        "flow_count": "flow_count",
        "R_pac": "packet_rate_bps",
        "on_mean": "on_mean_s",
        "off_mean": "off_mean_s",
        "packet_size_bits": "packet_size_bits",
        "duration": "duration_s",
        "tau": "tau_s",
        "knbg_period": "knbg_period_s",
        "seed": "seed",
        "forwarding_rate_multiplier": "forwarding_rate_multiplier",
        "N0": "n0",
    }
    changes: dict = {}
    for key, value in overrides.items():
        if key.startswith("eta"):
            idx = int(key[3:]) - 1
            if not 0 <= idx < 5:
                raise ConfigError(f"unknown key {key!r}")
            eta = list(changes.get("eta", scenario.eta))
            eta[idx] = float(value)
            changes["eta"] = tuple(eta)
            continue
        if key == "strategy":
            changes["strategy"] = str(value)
            continue
        if key not in mapping:
            raise ConfigError(f"unknown key {key!r}")
        attr = mapping[key]
        current = getattr(scenario, attr)
        changes[attr] = type(current)(value) if not isinstance(current, int) else int(float(value))
    return replace(scenario, **changes)
