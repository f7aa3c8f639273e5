"""Great-circle geodesy and distance-matrix construction for city instances.

Distances use a spherical earth of radius 3959 miles.  The production
formula is the arcsin form

    d = 2R asin sqrt(sin^2((lat1-lat2)/2) + sin^2((lon1-lon2)/2) cos lat1 cos lat2)

which stays accurate for nearby points; the classical arccos form

    d = R acos(cos lat1 cos lat2 cos(lon1-lon2) + sin lat1 sin lat2)

is kept for cross-checks.  Both take coordinates in degrees.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import DistanceMatrix

__all__ = [
    "EARTH_RADIUS_MILES",
    "CityRecord",
    "great_circle",
    "great_circle_deg",
    "great_circle_arccos_deg",
    "load_cities",
    "bundled_cities",
    "build_matrix",
]

EARTH_RADIUS_MILES = 3959.0

WEIGHTINGS = ("none", "product", "sum")
ROUNDINGS = ("int", "none")


@dataclass(frozen=True)
class CityRecord:
    """A named point with population, coordinates in degrees."""

    name: str
    lat: float
    lon: float
    population: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("city name must be nonempty")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} out of range for {self.name!r}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} out of range for {self.name!r}")
        if self.population < 0:
            raise ValueError(f"population must be nonnegative for {self.name!r}")


def great_circle_deg(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle miles between two lat/lon points, arcsin form."""
    p1 = math.radians(lat1)
    p2 = math.radians(lat2)
    t1 = math.radians(lon1)
    t2 = math.radians(lon2)
    h = math.sin((p1 - p2) / 2.0) ** 2 + math.sin((t1 - t2) / 2.0) ** 2 * math.cos(p1) * math.cos(p2)
    h = min(1.0, h)
    return 2.0 * EARTH_RADIUS_MILES * math.asin(math.sqrt(h))


def great_circle_arccos_deg(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle miles, arccos form; loses precision for small separations."""
    p1 = math.radians(lat1)
    p2 = math.radians(lat2)
    dt = math.radians(lon1) - math.radians(lon2)
    c = math.cos(p1) * math.cos(p2) * math.cos(dt) + math.sin(p1) * math.sin(p2)
    c = max(-1.0, min(1.0, c))
    return EARTH_RADIUS_MILES * math.acos(c)


def great_circle(a: CityRecord, b: CityRecord) -> float:
    """Great-circle miles between two cities."""
    return great_circle_deg(a.lat, a.lon, b.lat, b.lon)


def load_cities(source) -> list[CityRecord]:
    """Read city records from CSV with header ``name,lat,lng,population``.

    ``source`` may be a path or an open text stream.  Rows keep file order;
    the bundled dataset is sorted by population descending so the ``n``
    largest cities are a prefix slice.
    """
    if hasattr(source, "read"):
        return _parse_cities(source)
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _parse_cities(fh)


def _parse_cities(fh) -> list[CityRecord]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("missing CSV header") from None
    expected = ["name", "lat", "lng", "population"]
    if [h.strip() for h in header] != expected:
        raise ValueError(f"expected header {','.join(expected)}, got {','.join(header)}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            rec = CityRecord(row[0].strip(), float(row[1]), float(row[2]), int(row[3]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        records.append(rec)
    return records


def bundled_cities() -> list[CityRecord]:
    """The packaged 100-city dataset (most populous U.S. cities)."""
    text = resources.files("groupcut").joinpath("data/us_cities.csv").read_text("utf-8")
    return load_cities(io.StringIO(text))


def build_matrix(
    cities: list[CityRecord],
    weighting: str = "none",
    scale: float = 1.0,
    rounding: str = "int",
) -> DistanceMatrix:
    """Pairwise distance matrix over ``cities``.

    ``weighting`` multiplies the mileage by ``scale * pop_i * pop_j``
    ("product"), ``scale * (pop_i + pop_j)`` ("sum"), or nothing ("none").
    ``rounding`` is "int" for nearest integer (ties away from zero) or
    "none" to keep floats.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {weighting!r}")
    if rounding not in ROUNDINGS:
        raise ValueError(f"unknown rounding {rounding!r}")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    if not cities:
        raise ValueError("at least one city is required")
    lat = np.radians(np.array([c.lat for c in cities], dtype=np.float64))
    lon = np.radians(np.array([c.lon for c in cities], dtype=np.float64))
    s_lat = np.sin((lat[:, None] - lat[None, :]) / 2.0) ** 2
    s_lon = np.sin((lon[:, None] - lon[None, :]) / 2.0) ** 2
    h = np.clip(s_lat + s_lon * (np.cos(lat)[:, None] * np.cos(lat)[None, :]), 0.0, 1.0)
    d = 2.0 * EARTH_RADIUS_MILES * np.arcsin(np.sqrt(h))
    if weighting != "none":
        pop = np.array([c.population for c in cities], dtype=np.float64)
        factor = pop[:, None] * pop[None, :] if weighting == "product" else pop[:, None] + pop[None, :]
        d = d * (scale * factor)
    np.fill_diagonal(d, 0.0)
    if rounding == "int":
        d = np.floor(d + 0.5).astype(np.int64)
    return DistanceMatrix(d)
