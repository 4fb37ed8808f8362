import math

import numpy as np
import pytest
from scipy import stats

from src.antenna.cone import (
    ConeModelError,
    ap_hit_probabilities,
    beam_geometry,
    cone_gains,
    gain_probability_table,
    interferer_gain_pmf,
    interferer_hit_probabilities,
    r_u0_max,
    side_lobe_gain,
    ue_horizontal_hit_probability,
)
from src.antenna.pointing import (
    DegeneratePointingError,
    PointingModel,
    array_factor,
    gaussian_beam,
    mean_effective_gain,
    mean_gain_limit,
    pointing_loss_cdf,
    pointing_loss_pdf,
    sample_pointing_loss,
)
from src.core.params import Scenario, derive_constants

SIGMA_1_5 = math.radians(1.5)


@pytest.fixture
def constants():
    return derive_constants(Scenario())


class TestBeamPatterns:
    def test_boresight(self):
        assert array_factor(0.0, 0.0, 16) == pytest.approx(1.0)
        assert gaussian_beam(0.0, 0.0, 16) == pytest.approx(1.0)

    def test_small_offset(self):
        assert gaussian_beam(0.02, 0.0, 16) == pytest.approx(0.9129, abs=1e-4)
        assert array_factor(0.02, 0.0, 16) == pytest.approx(0.9188, abs=1e-4)

    def test_axes_are_separable(self):
        combined = array_factor(0.01, 0.015, 16)
        assert combined == pytest.approx(array_factor(0.01, 0.0, 16) * array_factor(0.0, 0.015, 16))

    def test_vectorized(self):
        theta = np.linspace(-0.05, 0.05, 11)
        pattern = array_factor(theta, np.zeros_like(theta), 32)
        assert pattern.shape == (11,)
        np.testing.assert_allclose(pattern, pattern[::-1])
        assert np.all(pattern <= 1.0 + 1e-12)


class TestPointingLoss:
    def test_beta(self):
        model = PointingModel(SIGMA_1_5, 16, 4)
        assert model.beta == pytest.approx(3.0135, rel=1e-4)
        assert not model.is_degenerate

    def test_degenerate_pdf(self):
        with pytest.raises(DegeneratePointingError, match="degenerate"):
            pointing_loss_pdf(0.5, PointingModel(0.0, 16, 4))

    def test_degenerate_sampler_and_cdf(self):
        model = PointingModel(0.0, 16, 4)
        np.testing.assert_array_equal(sample_pointing_loss(model, np.random.default_rng(0), 5), 1.0)
        assert pointing_loss_cdf(0.999, model) == 0.0
        assert pointing_loss_cdf(1.0, model) == 1.0

    def test_power_law(self):
        model = PointingModel(SIGMA_1_5, 16, 4)
        assert pointing_loss_cdf(0.5, model) == pytest.approx(0.5**model.beta)
        assert pointing_loss_pdf(0.5, model) == pytest.approx(model.beta * 0.5 ** (model.beta - 1))

    def test_pdf_domain(self):
        model = PointingModel(SIGMA_1_5, 16, 4)
        with pytest.raises(ValueError):
            pointing_loss_pdf(0.0, model)
        with pytest.raises(ValueError):
            pointing_loss_pdf(1.5, model)

    def test_invalid_model(self):
        with pytest.raises(ValueError):
            PointingModel(SIGMA_1_5, 16, 4, mode="perfect")
        with pytest.raises(ValueError):
            PointingModel(-0.1, 16, 4)

    @pytest.mark.parametrize("n_a", [16, 32])
    def test_gaussian_sampler_follows_power_law(self, n_a):
        model = PointingModel(SIGMA_1_5, n_a, 4, mode="gaussian")
        draws = sample_pointing_loss(model, np.random.default_rng(n_a), 200_000)
        assert stats.kstest(draws, lambda h: pointing_loss_cdf(h, model)).statistic <= 0.005

    @pytest.mark.slow
    @pytest.mark.parametrize("n_a, bound", [(16, 0.035), (32, 0.05)])
    def test_exact_sampler_close_to_power_law(self, n_a, bound):
        exact = PointingModel(SIGMA_1_5, n_a, 4, mode="exact")
        law = PointingModel(SIGMA_1_5, n_a, 4)
        draws = sample_pointing_loss(exact, np.random.default_rng(21), 100_000)
        # array factor main lobe is wider than the Gaussian beam; the gap grows with N_A
        assert stats.kstest(draws, lambda h: pointing_loss_cdf(h, law)).statistic <= bound

    def test_densities_cross(self):
        small = PointingModel(SIGMA_1_5, 16, 4)
        large = PointingModel(SIGMA_1_5, 32, 4)
        assert pointing_loss_pdf(0.05, large) > pointing_loss_pdf(0.05, small)
        assert pointing_loss_pdf(0.9, large) < pointing_loss_pdf(0.9, small)

    @pytest.mark.slow
    def test_empirical_densities_cross(self):
        counts = {}
        for n_a in (16, 32):
            model = PointingModel(SIGMA_1_5, n_a, 4, mode="exact")
            draws = sample_pointing_loss(model, np.random.default_rng(100 + n_a), 1_000_000)
            counts[n_a] = np.histogram(draws, bins=20, range=(0.0, 1.0))[0]
        # bins [0.05, 0.1) and [0.9, 0.95)
        assert counts[32][1] > counts[16][1] + 4 * math.sqrt(counts[32][1] + counts[16][1])
        assert counts[32][18] < counts[16][18] - 4 * math.sqrt(counts[32][18] + counts[16][18])


class TestMeanGain:
    def test_no_pointing_error(self):
        assert mean_effective_gain(PointingModel(0.0, 16, 4)) == pytest.approx(
            math.pi**2 * 256 * 16
        )

    def test_with_pointing_error(self):
        assert mean_effective_gain(PointingModel(SIGMA_1_5, 16, 4)) == pytest.approx(30354, rel=1e-3)

    def test_large_array_limit(self):
        limit = mean_gain_limit(SIGMA_1_5, 4)
        assert limit == pytest.approx(129436, rel=1e-3)
        assert mean_effective_gain(PointingModel(SIGMA_1_5, 512, 4)) == pytest.approx(limit, rel=0.01)

    def test_balanced_arrays_gain_more(self):
        gains = [mean_effective_gain(PointingModel(SIGMA_1_5, a, u)) for a, u in [(8, 8), (16, 4), (32, 2)]]
        assert gains[0] > gains[1] > gains[2]

    @pytest.mark.slow
    @pytest.mark.parametrize("n_a", [16, 32])
    def test_sampled_mean_gain(self, n_a):
        model = PointingModel(SIGMA_1_5, n_a, 4, mode="exact")
        draws = sample_pointing_loss(model, np.random.default_rng(7), 100_000)
        empirical = model.max_gain * float(np.mean(draws))
        assert empirical == pytest.approx(mean_effective_gain(model), rel=0.05)


class TestConeModel:
    def test_side_lobe_gains(self):
        assert side_lobe_gain(16) == pytest.approx(0.2136, abs=5e-4)
        assert side_lobe_gain(4) == pytest.approx(0.1915, abs=5e-4)

    def test_side_lobe_needs_array(self):
        with pytest.raises(ConeModelError):
            side_lobe_gain(1)

    def test_cone_gains(self, constants):
        gains = cone_gains(constants, Scenario())
        assert gains.A_main == pytest.approx(math.pi * 256)
        combos = gains.combinations()
        assert combos[0] == pytest.approx(gains.A_main * gains.U_main)
        assert combos[3] == pytest.approx(gains.A_side * gains.U_side)

    def test_beam_geometry(self, constants):
        beams = beam_geometry(constants)
        assert beams.phi_A_H == beams.phi_A_V == pytest.approx(2 * 0.886 / 16)
        assert beams.phi_U_V == pytest.approx(2 * 0.886 / 4)
        assert beams.phi_AP == pytest.approx(math.atan(2.0 / 15.0))

    def test_ap_hit_probabilities(self, constants):
        p_h, p_v = ap_hit_probabilities(constants)
        assert p_h == pytest.approx(0.017627, rel=1e-4)
        assert p_v == pytest.approx(0.077004, rel=1e-4)
        assert p_h * p_v == pytest.approx(1.3573e-3, rel=1e-3)

    def test_ue_hit_probability(self, constants):
        assert ue_horizontal_hit_probability(constants) == pytest.approx(0.443 / (2 * math.pi))

    def test_vertical_reach(self, constants):
        assert r_u0_max(5.0, constants) == pytest.approx(12.47, abs=0.01)
        assert math.isinf(r_u0_max(10.0, constants))
        reach = r_u0_max(np.array([1.0, 5.0, 10.0]), constants)
        assert reach.shape == (3,)

    def test_interferer_probabilities(self, constants):
        p_a, p_u = interferer_hit_probabilities(np.array([6.0, 20.0]), 5.0, constants)
        assert p_a == pytest.approx(1.3573e-3, rel=1e-3)
        assert p_u[0] == pytest.approx(ue_horizontal_hit_probability(constants))
        assert p_u[1] == 0.0

    def test_gain_table_rows_sum_to_one(self, constants):
        table = gain_probability_table(np.linspace(5.0, 50.0, 10), 5.0, constants)
        assert table.shape == (10, 4)
        np.testing.assert_allclose(table.sum(axis=1), 1.0)

    def test_gain_pmf(self, constants):
        pmf = interferer_gain_pmf(6.0, 5.0, constants, Scenario())
        assert pmf.probabilities.sum() == pytest.approx(1.0)
        assert pmf.mean() > pmf.gains.min()
        with pytest.raises(ValueError):
            interferer_gain_pmf(4.0, 5.0, constants, Scenario())
