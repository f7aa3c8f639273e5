import io
import math

import mpmath as mp
import numpy as np
import pytest

from groupcut import CityRecord, DistanceMatrix, build_matrix, great_circle, load_cities
from groupcut.geo import (
    EARTH_RADIUS_MILES,
    great_circle_arccos_deg,
    great_circle_deg,
)

# Frozen from a 50-digit evaluation of the arcsin form (oracle below).
NY_LA_MILES = 2456.8193681594614


def high_precision_miles(lat1, lon1, lat2, lon2):
    """Independent arbitrary-precision evaluation of the arcsin form."""
    mp.mp.dps = 50
    r = mp.mpf(3959)
    p1, p2 = mp.radians(mp.mpf(str(lat1))), mp.radians(mp.mpf(str(lat2)))
    t1, t2 = mp.radians(mp.mpf(str(lon1))), mp.radians(mp.mpf(str(lon2)))
    h = mp.sin((p1 - p2) / 2) ** 2 + mp.sin((t1 - t2) / 2) ** 2 * mp.cos(p1) * mp.cos(p2)
    return float(2 * r * mp.asin(mp.sqrt(h)))


class TestGreatCircle:
    def test_identical_coordinates_zero(self):
        a = CityRecord("a", 40.0, -73.0, 1)
        assert great_circle(a, a) == 0.0

    def test_antipodal_half_circumference(self):
        d = great_circle_deg(37.5, -100.0, -37.5, 80.0)
        assert d == pytest.approx(math.pi * EARTH_RADIUS_MILES, rel=1e-9)

    def test_new_york_to_los_angeles_vs_high_precision(self):
        d = great_circle_deg(40.6943, -73.9249, 34.1140, -118.4068)
        oracle = high_precision_miles(40.6943, -73.9249, 34.1140, -118.4068)
        assert oracle == pytest.approx(NY_LA_MILES, rel=1e-12)
        assert d == pytest.approx(oracle, rel=1e-6)

    def test_symmetry_and_bounds_random(self, rng):
        for _ in range(500):
            lat1, lat2 = rng.uniform(-90, 90, size=2)
            lon1, lon2 = rng.uniform(-180, 180, size=2)
            d = great_circle_deg(lat1, lon1, lat2, lon2)
            assert d == great_circle_deg(lat2, lon2, lat1, lon1)
            assert 0.0 <= d <= math.pi * EARTH_RADIUS_MILES * (1 + 1e-12)

    def test_triangle_inequality_sampled(self, rng):
        for _ in range(300):
            pts = [(rng.uniform(-90, 90), rng.uniform(-180, 180)) for _ in range(3)]
            ab = great_circle_deg(*pts[0], *pts[1])
            bc = great_circle_deg(*pts[1], *pts[2])
            ac = great_circle_deg(*pts[0], *pts[2])
            assert ac <= ab + bc + 1e-6

    def test_arccos_form_agrees_with_arcsin_form(self, rng):
        for _ in range(2000):
            lat1, lat2 = rng.uniform(-90, 90, size=2)
            lon1, lon2 = rng.uniform(-180, 180, size=2)
            stable = great_circle_deg(lat1, lon1, lat2, lon2)
            classic = great_circle_arccos_deg(lat1, lon1, lat2, lon2)
            if stable > 1.0:
                assert classic == pytest.approx(stable, rel=1e-6)


class TestLoadCities:
    def test_bundled_dataset(self, cities):
        assert len(cities) == 100
        assert cities[0].name == "New York"
        assert cities[0].lat == pytest.approx(40.6943)
        assert cities[0].lon == pytest.approx(-73.9249)
        pops = [c.population for c in cities]
        assert all(a > b for a, b in zip(pops, pops[1:]))
        assert all(-90 <= c.lat <= 90 and -180 <= c.lon <= 180 for c in cities)

    def test_empty_body(self):
        assert load_cities(io.StringIO("name,lat,lng,population\n")) == []

    def test_bad_header(self):
        with pytest.raises(ValueError, match="header"):
            load_cities(io.StringIO("city,lat,lon,pop\nX,0,0,1\n"))

    def test_out_of_range_latitude_names_line(self):
        stream = io.StringIO("name,lat,lng,population\nA,10,20,5\nB,95,10,5\n")
        with pytest.raises(ValueError, match="line 3"):
            load_cities(stream)

    def test_wrong_field_count_names_line(self):
        stream = io.StringIO("name,lat,lng,population\nA,10,20\n")
        with pytest.raises(ValueError, match="line 2"):
            load_cities(stream)


class TestBuildMatrix:
    def test_two_cities_symmetric_integer(self, cities):
        m = build_matrix(cities[:2], rounding="int")
        assert m.is_integral
        assert m.values[0, 1] == m.values[1, 0] > 0
        assert m.values[0, 0] == m.values[1, 1] == 0

    def test_rounding_is_nearest_half_away(self, cities):
        exact = build_matrix(cities[:10], rounding="none")
        rounded = build_matrix(cities[:10], rounding="int")
        assert np.array_equal(rounded.values, np.floor(exact.values + 0.5).astype(np.int64))

    def test_benchmark_matrix_40(self, cities):
        m = build_matrix(cities[:40], rounding="int")
        assert m.n == 40 and m.is_integral
        assert np.array_equal(m.values, m.values.T)
        assert np.all(np.diagonal(m.values) == 0)
        ny_la = great_circle(cities[0], cities[1])
        assert m.values[0, 1] == round(ny_la)

    def test_product_weighting_composes(self, cities):
        picks = cities[:3]
        scale = 1e-12
        m = build_matrix(picks, weighting="product", scale=scale, rounding="none")
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                want = scale * picks[i].population * picks[j].population * great_circle(
                    picks[i], picks[j]
                )
                assert m.values[i, j] == pytest.approx(want, rel=1e-12)

    def test_sum_weighting_composes(self, cities):
        picks = cities[:3]
        scale = 1e-6
        m = build_matrix(picks, weighting="sum", scale=scale, rounding="none")
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                want = scale * (picks[i].population + picks[j].population) * great_circle(
                    picks[i], picks[j]
                )
                assert m.values[i, j] == pytest.approx(want, rel=1e-12)

    def test_duplicate_coordinates_allowed(self):
        a = CityRecord("a", 10.0, 20.0, 1)
        b = CityRecord("b", 10.0, 20.0, 2)
        m = build_matrix([a, b], rounding="int")
        assert m.values[0, 1] == 0

    def test_bad_options_raise(self, cities):
        with pytest.raises(ValueError):
            build_matrix(cities[:2], weighting="geometric")
        with pytest.raises(ValueError):
            build_matrix(cities[:2], rounding="ceil")
        with pytest.raises(ValueError):
            build_matrix(cities[:2], weighting="sum", scale=0.0)
        with pytest.raises(ValueError):
            build_matrix([])

    def test_coordinate_validation(self):
        with pytest.raises(ValueError):
            CityRecord("x", 91.0, 0.0, 1)
        with pytest.raises(ValueError):
            CityRecord("x", 0.0, 181.0, 1)
        with pytest.raises(ValueError):
            CityRecord("", 0.0, 0.0, 1)
