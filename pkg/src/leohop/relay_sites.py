"""Default ground relay deployments.

The production deployment this models is only loosely documented (a world
map and a mean latitude around 28 degrees), so these 25 sites are a
reconstruction: gateway-city locations spread over six continents with a
mean absolute latitude close to 28 degrees.  The first-phase subset holds
12 of them.  Treat the coordinates as a plausible stand-in, not as data.
"""

from __future__ import annotations

import math

from .constellation import GroundRelay

# (name, lat_deg, lon_deg); names are informational only
_SITES_25 = [
    ("seattle", 47.6, -122.3),
    ("denver", 39.7, -104.9),
    ("atlanta", 33.7, -84.4),
    ("mexico_city", 19.4, -99.1),
    ("los_angeles", 34.1, -118.2),
    ("sao_paulo", -23.6, -46.6),
    ("santiago", -33.4, -70.7),
    ("bogota", 4.7, -74.1),
    ("madrid", 40.4, -3.7),
    ("rome", 41.9, 12.5),
    ("lisbon", 38.7, -9.1),
    ("athens", 38.0, 23.7),
    ("cairo", 30.0, 31.2),
    ("lagos", 6.5, 3.4),
    ("johannesburg", -26.2, 28.0),
    ("nairobi", -1.3, 36.8),
    ("dubai", 25.2, 55.3),
    ("tel_aviv", 32.1, 34.8),
    ("mumbai", 19.1, 72.9),
    ("singapore", 1.4, 103.8),
    ("beijing", 39.9, 116.4),
    ("tokyo", 35.7, 139.7),
    ("seoul", 37.6, 127.0),
    ("sydney", -33.9, 151.2),
    ("brisbane", -27.5, 153.0),
]

_PHASE1_NAMES = {
    "seattle", "atlanta", "mexico_city", "sao_paulo", "madrid", "cairo",
    "johannesburg", "dubai", "mumbai", "beijing", "tokyo", "sydney",
}

# Elevation mask calibrated so each relay sees about ten gateways on the
# 1584-satellite shell; 40 degrees is the conservative per-relay default
# used when nothing is configured.
CALIBRATED_MIN_ELEVATION_DEG = 24.5


def default_relays(count: int = 25, min_elevation_deg: float = CALIBRATED_MIN_ELEVATION_DEG
                   ) -> list[GroundRelay]:
    """The reconstructed relay set; count selects 25 (full) or 12 (phase 1)."""
    if count == 25:
        chosen = _SITES_25
    elif count == 12:
        chosen = [s for s in _SITES_25 if s[0] in _PHASE1_NAMES]
    else:
        raise ValueError("bundled relay sets exist for 12 or 25 sites")
    return [
        GroundRelay(
            relay_id=k + 1,
            lat=math.radians(lat),
            lon=math.radians(lon) % (2 * math.pi),
            min_elevation=math.radians(min_elevation_deg),
        )
        for k, (_, lat, lon) in enumerate(chosen)
    ]


def site_names(count: int = 25) -> list[str]:
    if count == 25:
        return [s[0] for s in _SITES_25]
    return [s[0] for s in _SITES_25 if s[0] in _PHASE1_NAMES]
