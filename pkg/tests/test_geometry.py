import math

import numpy as np
import pytest
from scipy import integrate, stats

from src.core.params import Scenario, derive_constants
from src.geometry.blockage import (
    human_los_probability,
    los_intensity,
    los_mass,
    los_mass_limit,
    los_probability,
    mean_nearest_los_distance,
    nearest_los_cdf,
    nearest_los_pdf,
    nearest_los_quantile,
    wall_los_probability,
)
from src.geometry.scene import (
    ApField,
    BlockageField,
    is_los,
    is_los_many,
    sample_ap_field,
    sample_blockage_field,
    scene_to_dict,
    wall_margin,
)


@pytest.fixture
def scenario():
    return Scenario()


@pytest.fixture
def constants(scenario):
    return derive_constants(scenario)


def _field(humans=(), walls=(), lengths=(), orientations=(), radius=30.0):
    return BlockageField(
        human_centers=np.array(humans, dtype=float).reshape(-1, 2),
        human_radius=0.25,
        human_height=1.7,
        wall_centers=np.array(walls, dtype=float).reshape(-1, 2),
        wall_lengths=np.array(lengths, dtype=float),
        wall_orientations=np.array(orientations, dtype=float),
        region_radius=radius,
    )


class TestBlockageLaws:
    def test_los_probability(self, constants):
        assert los_probability(10.0, constants) == pytest.approx(0.3911, abs=1e-4)
        assert los_probability(0.0, constants) == 1.0

    def test_factors_multiply(self, constants):
        d = np.array([1.0, 7.5, 30.0])
        np.testing.assert_allclose(
            human_los_probability(d, constants) * wall_los_probability(d, constants),
            los_probability(d, constants),
        )

    def test_negative_distance(self, constants):
        with pytest.raises(ValueError):
            los_probability(-1.0, constants)

    def test_los_intensity(self, scenario, constants):
        assert los_intensity(10.0, constants, scenario) == pytest.approx(2.457, abs=1e-3)
        d = np.linspace(0.5, 40.0, 4000)
        peak = d[np.argmax(los_intensity(d, constants, scenario))]
        assert peak == pytest.approx(10.650, abs=0.02)

    def test_total_mass(self, scenario, constants):
        assert los_mass_limit(constants, scenario) == pytest.approx(71.27, rel=1e-3)

    def test_mass_matches_quadrature(self, scenario, constants):
        for d0 in (0.5, 2.0, 10.0, 40.0):
            numeric, _ = integrate.quad(
                lambda d: los_intensity(d, constants, scenario), 0.0, d0, epsabs=0, epsrel=1e-12
            )
            assert los_mass(d0, constants, scenario) == pytest.approx(numeric, rel=1e-8)

    def test_mass_at_two_metres(self, scenario, constants):
        assert los_mass(2.0, constants, scenario) == pytest.approx(1.1096, rel=1e-3)

    def test_mass_small_distance(self, scenario, constants):
        # leading term pi lambda_A d^2
        d = 1e-5
        assert los_mass(d, constants, scenario) == pytest.approx(math.pi * 0.1 * d**2, rel=1e-4)

    def test_nearest_pdf(self, scenario, constants):
        assert nearest_los_pdf(2.0, constants, scenario) == pytest.approx(0.3434, abs=2e-4)
        total, _ = integrate.quad(
            lambda d: nearest_los_pdf(d, constants, scenario), 0.0, math.inf, limit=200
        )
        assert total == pytest.approx(nearest_los_cdf(1e4, constants, scenario), rel=1e-6)

    def test_quantile_inverts_cdf(self, scenario, constants):
        for u in (1e-6, 0.1, 0.5, 0.99):
            d = nearest_los_quantile(u, constants, scenario)
            assert nearest_los_cdf(d, constants, scenario) == pytest.approx(u, rel=1e-7)
        assert nearest_los_quantile(0.0, constants, scenario) == 0.0

    def test_quantile_out_of_range(self, scenario, constants):
        with pytest.raises(ValueError):
            nearest_los_quantile(1.0, constants, scenario)

    def test_mean_distance_grows_with_blockage(self, scenario, constants):
        base = mean_nearest_los_distance(constants, scenario)
        crowded = Scenario(lambda_B=0.3)
        walled = Scenario(mean_L_W=6.0)
        assert mean_nearest_los_distance(derive_constants(crowded), crowded) > base
        assert mean_nearest_los_distance(derive_constants(walled), walled) > base


class TestScene:
    def test_ap_field_density(self, scenario):
        rng = np.random.default_rng(3)
        counts = [len(sample_ap_field(scenario, rng, 20.0)) for _ in range(200)]
        assert np.mean(counts) == pytest.approx(0.1 * math.pi * 400, rel=0.03)

    def test_ap_field_radius(self, scenario):
        field = sample_ap_field(scenario, np.random.default_rng(0), 15.0)
        assert np.all(field.distances <= 15.0)
        with pytest.raises(ValueError):
            sample_ap_field(scenario, np.random.default_rng(0), 0.0)

    def test_blockage_field_margin(self, scenario):
        field = sample_blockage_field(scenario, np.random.default_rng(1), radius=10.0, margin=2.0)
        assert field.region_radius == 12.0
        assert np.all(np.hypot(*field.human_centers.T) <= 12.0)
        np.testing.assert_array_equal(field.wall_lengths, 3.0)
        assert set(np.unique(field.wall_orientations)) <= {0.0, math.pi / 2}

    def test_exponential_wall_lengths(self):
        s = Scenario(wall_length_mode="exponential", lambda_W=0.5)
        field = sample_blockage_field(s, np.random.default_rng(2), radius=30.0)
        assert field.wall_lengths.mean() == pytest.approx(3.0, rel=0.1)
        assert wall_margin(s) == 9.0
        assert wall_margin(Scenario()) == 1.5

    def test_human_blocks_only_low_part_of_link(self, scenario):
        aps = np.array([[10.0, 0.0]])
        # blockage zone reaches 0.35 d = 3.5 m from the UE
        assert not is_los_many(aps, _field(humans=[(2.0, 0.1)]), scenario)[0]
        assert is_los_many(aps, _field(humans=[(5.0, 0.0)]), scenario)[0]
        assert is_los_many(aps, _field(humans=[(2.0, 0.3)]), scenario)[0]
        assert is_los_many(aps, _field(humans=[(-1.0, 0.0)]), scenario)[0]

    def test_overhead_ap_is_los(self, scenario):
        field = _field(
            humans=[(0.0, 0.0), (0.1, 0.0)], walls=[(0.0, 0.0)], lengths=[3.0], orientations=[0.0]
        )
        aps = np.array([[0.0, 0.0], [10.0, 0.0]])
        assert is_los_many(aps, field, scenario).tolist() == [True, False]

    def test_wall_crossing(self, scenario):
        wall = _field(walls=[(5.0, 0.0)], lengths=[3.0], orientations=[math.pi / 2])
        assert not is_los(np.array([10.0, 0.0]), wall, scenario)
        assert is_los(np.array([10.0, 10.0]), wall, scenario)
        assert is_los(np.array([4.0, 0.0]), wall, scenario)

    def test_empty_field_is_all_los(self, scenario):
        points = np.random.default_rng(0).uniform(-10, 10, size=(50, 2))
        assert is_los_many(points, _field(), scenario).all()

    def test_vectorized_matches_single(self, scenario):
        rng = np.random.default_rng(9)
        blockage = sample_blockage_field(scenario, rng, radius=25.0, margin=2.0)
        points = sample_ap_field(scenario, rng, 25.0).positions
        many = is_los_many(points, blockage, scenario)
        single = [is_los(p, blockage, scenario) for p in points]
        np.testing.assert_array_equal(many, single)

    def test_scene_to_dict(self, scenario):
        wall = _field(walls=[(5.0, 1.0)], lengths=[2.0], orientations=[0.0])
        aps = ApField(positions=np.array([[1.0, 2.0]]), region_radius=30.0)
        scene = scene_to_dict(aps, wall)
        assert scene["aps"] == [[1.0, 2.0]]
        assert scene["walls"] == [{"start": [4.0, 1.0], "end": [6.0, 1.0]}]
        assert scene["humans"]["centers"] == []

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [5.0, 10.0, 15.0])
    def test_geometric_los_fraction(self, scenario, constants, d):
        rng = np.random.default_rng(int(d))
        margin = wall_margin(scenario) + scenario.R_B
        n, hits = 20_000, 0
        for _ in range(n):
            angle = rng.uniform(0.0, 2 * math.pi)
            point = np.array([[d * math.cos(angle), d * math.sin(angle)]])
            field = sample_blockage_field(scenario, rng, radius=d, margin=margin)
            hits += bool(is_los_many(point, field, scenario)[0])
        expected = los_probability(d, constants)
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(hits / n - expected) <= 3 * se

    @pytest.mark.slow
    def test_human_blockage_is_exponential(self, scenario, constants):
        s = Scenario(lambda_W=1e-12)
        rng = np.random.default_rng(4)
        point = np.array([[8.0, 0.0]])
        n = 20_000
        hits = sum(
            bool(is_los_many(point, sample_blockage_field(s, rng, 8.0, s.R_B), s)[0])
            for _ in range(n)
        )
        expected = math.exp(-constants.alpha * 8.0)
        assert hits / n == pytest.approx(expected, abs=3 * math.sqrt(expected * (1 - expected) / n))
