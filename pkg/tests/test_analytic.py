import math

import numpy as np
import pytest

from src.analytic.coverage import (
    AnalyticEngine,
    ClampError,
    SeriesConvergenceError,
    _clamp,
    conditional_coverage,
    coverage_curve,
    coverage_probability,
    retained_terms,
    threshold_scale,
)
from src.analytic.laplace import (
    interference_grid,
    laplace_derivatives,
    laplace_interference,
    mean_interference,
    scaled_laplace_coefficients,
)
from src.analytic.quadrature import (
    QuadratureSpec,
    gauss_legendre,
    interference_cutoff,
    outer_nodes,
    panel_breaks,
)
from src.channel.large_scale import path_weight
from src.channel.mftr import build_mftr_model, mftr_survival
from src.core.params import MftrParams, Scenario, derive_constants
from src.geometry.blockage import los_mass_limit
from src.simulate.conditional import empirical_laplace, simulate_conditional_coverage
from src.simulate.engine import estimate_coverage
from src.simulate.rng import stream_rng
from src.simulate.trial import TrialSetup

SMALL_SPEC = QuadratureSpec(d0_nodes=6, hpe_nodes=4, panel_nodes=8)
D0 = 5.0


@pytest.fixture
def scenario():
    return Scenario()


@pytest.fixture
def constants(scenario):
    return derive_constants(scenario)


@pytest.fixture
def model(scenario):
    return build_mftr_model(scenario.mftr)


@pytest.fixture
def grid(constants, scenario):
    return interference_grid(D0, constants, scenario, QuadratureSpec())


def _natural_scale(constants, scenario):
    """1 / E[I + N0] at the reference serving distance."""
    return 1.0 / (mean_interference(D0, constants, scenario) + constants.N0_lin)


class TestQuadrature:
    def test_gauss_legendre_interval(self):
        x, w = gauss_legendre(2.0, 5.0, 8)
        assert w.sum() == pytest.approx(3.0)
        assert np.all((x > 2.0) & (x < 5.0))
        assert np.dot(w, x**3) == pytest.approx((5.0**4 - 2.0**4) / 4)

    def test_interference_cutoff(self, constants):
        rate = constants.blockage_rate
        cutoff = interference_cutoff(constants, 1e-8)
        peak = math.exp(-1.0) / rate
        assert cutoff > 1.0 / rate
        assert cutoff * math.exp(-rate * cutoff) == pytest.approx(1e-8 * peak, rel=1e-6)

    def test_cutoff_needs_blockage(self):
        c = derive_constants(Scenario(lambda_B=0.0, lambda_W=0.0))
        with pytest.raises(ValueError, match="blockage rate"):
            interference_cutoff(c)

    def test_panel_breaks(self):
        breaks = panel_breaks(5.0, 100.0, 12.5)
        assert breaks[:2] == [5.0, 12.5]
        assert breaks[-1] == 100.0
        assert all(b > a for a, b in zip(breaks, breaks[1:]))

    def test_outer_node_weights(self, constants, scenario):
        nodes = outer_nodes(constants, scenario, SMALL_SPEC)
        expected = -math.expm1(-los_mass_limit(constants, scenario))
        assert nodes.d0_weights.sum() == pytest.approx(expected)
        np.testing.assert_array_equal(nodes.h_pe, [1.0])
        assert nodes.h_weights.sum() == pytest.approx(1.0)
        assert np.all(np.diff(nodes.d0) > 0)

    def test_outer_nodes_with_pointing_error(self):
        s = Scenario(sigma_theta_deg=1.5)
        nodes = outer_nodes(derive_constants(s), s, SMALL_SPEC)
        assert nodes.h_pe.size == SMALL_SPEC.hpe_nodes
        assert nodes.h_weights.sum() == pytest.approx(1.0)
        assert np.all((nodes.h_pe > 0) & (nodes.h_pe < 1))

    def test_refined_spec(self):
        finer = SMALL_SPEC.refined()
        assert (finer.d0_nodes, finer.hpe_nodes, finer.panel_nodes) == (12, 8, 16)
        assert finer.cutoff_rel == SMALL_SPEC.cutoff_rel

    @pytest.mark.slow
    @pytest.mark.parametrize("sigma_deg", [0.0, 1.5])
    def test_refinement_is_stable(self, sigma_deg):
        s = Scenario(sigma_theta_deg=sigma_deg)
        grid_db = [0.0, 10.0, 20.0, 30.0, 40.0]
        spec = QuadratureSpec()
        base = AnalyticEngine(s, spec=spec, workers=1, show_progress=False).evaluate(grid_db)
        finer = AnalyticEngine(s, spec=spec.refined(), workers=1, show_progress=False).evaluate(grid_db)
        assert np.max(np.abs(finer.values - base.values)) < 2e-3


class TestLaplaceTransform:
    def test_zero_argument(self, constants, scenario, model):
        assert laplace_interference(0.0, D0, constants, scenario, model) == 1.0

    def test_negative_argument(self, constants, scenario, model):
        with pytest.raises(ValueError):
            laplace_interference(-1.0, D0, constants, scenario, model)

    def test_jensen_lower_bound(self, constants, scenario, model):
        s_val = _natural_scale(constants, scenario)
        value = laplace_interference(s_val, D0, constants, scenario, model)
        assert math.exp(-1.0) <= value < 1.0

    def test_adaptive_matches_grid(self, constants, scenario, model, grid):
        for factor in (0.1, 1.0, 10.0):
            s_val = factor * _natural_scale(constants, scenario)
            adaptive = laplace_interference(s_val, D0, constants, scenario, model)
            on_grid = laplace_derivatives(s_val, D0, 0, constants, scenario, model, grid=grid)[0]
            assert on_grid == pytest.approx(adaptive, rel=1e-6)

    def test_decreasing_in_s(self, constants, scenario, model, grid):
        base = _natural_scale(constants, scenario)
        values = [
            laplace_derivatives(f * base, D0, 0, constants, scenario, model, grid=grid)[0]
            for f in (0.01, 0.1, 1.0, 10.0)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_derivatives_match_finite_differences(self, constants, scenario, model, grid):
        s_val = _natural_scale(constants, scenario)
        h = 1e-4 * s_val
        center = laplace_derivatives(s_val, D0, 4, constants, scenario, model, grid=grid)
        upper = laplace_derivatives(s_val + h, D0, 3, constants, scenario, model, grid=grid)
        lower = laplace_derivatives(s_val - h, D0, 3, constants, scenario, model, grid=grid)
        for l in range(4):
            slope = (upper[l] - lower[l]) / (2 * h)
            assert slope == pytest.approx(center[l + 1], rel=1e-4)

    def test_derivative_signs(self, constants, scenario, model, grid):
        s_val = _natural_scale(constants, scenario)
        derivatives = laplace_derivatives(s_val, D0, 8, constants, scenario, model, grid=grid)
        signs = np.sign(derivatives)
        np.testing.assert_array_equal(signs, [(-1) ** l for l in range(9)])

    def test_scaled_coefficients_match_raw(self, constants, scenario, model, grid):
        s_val = _natural_scale(constants, scenario)
        raw = laplace_derivatives(s_val, D0, 12, constants, scenario, model, grid=grid)
        scaled = scaled_laplace_coefficients(s_val, grid, constants, model, 12)
        l = np.arange(13)
        expected = (-s_val) ** l * raw / np.array([math.factorial(k) for k in l])
        np.testing.assert_allclose(scaled, expected, rtol=1e-7)

    def test_high_orders_use_scaled_path(self, constants, scenario, model, grid):
        s_val = _natural_scale(constants, scenario)
        raw = laplace_derivatives(s_val, D0, 12, constants, scenario, model, grid=grid)
        high = laplace_derivatives(s_val, D0, 30, constants, scenario, model, grid=grid)
        assert high.shape == (31,)
        np.testing.assert_allclose(high[:13], raw, rtol=1e-7)

    def test_scaled_coefficients_are_a_subprobability(self, constants, scenario, model, grid):
        s_val = 10 * _natural_scale(constants, scenario)
        scaled = scaled_laplace_coefficients(s_val, grid, constants, model, 200)
        assert np.all(scaled >= 0)
        assert scaled.sum() <= 1.0 + 1e-12

    def test_beyond_cutoff_only_noise(self, constants, scenario, model):
        far = interference_cutoff(constants) + 1.0
        value = laplace_interference(1e6, far, constants, scenario, model)
        assert value == pytest.approx(math.exp(-1e6 * constants.N0_lin))


class TestConditionalCoverage:
    def test_retained_terms(self, model):
        n = retained_terms(model, 1e-8)
        tail = model.tail_mass()
        assert 1 <= n <= model.weights.size
        if n < model.weights.size:
            assert tail[n] < 1e-8
        assert tail[n - 1] >= 1e-8

    def test_threshold_scale(self, constants, scenario, model):
        rho = threshold_scale(0.5, D0, 10.0, constants, scenario, model)
        signal = constants.P_t_lin * constants.xi * constants.G_max * 0.5 * path_weight(
            D0, constants, scenario
        )
        assert rho == pytest.approx(10.0 / (model.sigma2_half * signal))

    def test_noise_limited_matches_fading_survival(self):
        s = Scenario(lambda_A=1e-9)
        c = derive_constants(s)
        model = build_mftr_model(s.mftr)
        signal = c.P_t_lin * c.xi * c.G_max * path_weight(D0, c, s)
        for gamma in (10.0, 100.0, 1000.0):
            value = conditional_coverage(1.0, D0, gamma, c, s, model)
            expected = mftr_survival(gamma * c.N0_lin / signal, model)
            assert value == pytest.approx(expected, rel=1e-6, abs=1e-10)

    def test_monotone_in_threshold_and_pointing(self, constants, scenario, model, grid):
        gammas = [1.0, 10.0, 100.0, 1000.0]
        values = [
            conditional_coverage(1.0, D0, g, constants, scenario, model, grid=grid)
            for g in gammas
        ]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b <= a for a, b in zip(values, values[1:]))
        weaker = conditional_coverage(0.3, D0, 100.0, constants, scenario, model, grid=grid)
        assert weaker <= values[2]

    def test_printed_rho_stays_a_probability(self, constants, scenario, model, grid):
        spec = QuadratureSpec(printed_rho=True)
        value = conditional_coverage(1.0, D0, 100.0, constants, scenario, model, spec, grid)
        assert 0.0 <= value <= 1.0

    def test_invalid_arguments(self, constants, scenario, model):
        with pytest.raises(ValueError):
            conditional_coverage(0.0, D0, 10.0, constants, scenario, model)
        with pytest.raises(ValueError):
            conditional_coverage(1.0, D0, 0.0, constants, scenario, model)

    def test_derivative_cap(self, constants, scenario, model):
        with pytest.raises(SeriesConvergenceError):
            conditional_coverage(
                1.0, D0, 10.0, constants, scenario, model, QuadratureSpec(l_cap=0)
            )

    def test_clamp(self):
        assert _clamp(-1e-9, 1e-6) == 0.0
        assert _clamp(1.0 + 1e-9, 1e-6) == 1.0
        with pytest.raises(ClampError):
            _clamp(1.01, 1e-6)


class TestAnalyticEngine:
    def test_curve(self):
        engine = AnalyticEngine(
            Scenario(sigma_theta_deg=1.5), spec=SMALL_SPEC, workers=1, show_progress=False
        )
        curve = engine.evaluate([-10.0, 0.0, 10.0, 20.0])
        assert curve.provenance == "analytic"
        assert curve.ci_halfwidth is None
        assert np.all((curve.values >= 0) & (curve.values <= 1))
        assert curve.is_nonincreasing()
        assert curve.values[0] > curve.values[-1]
        assert curve.metadata["d0_nodes"] == 6
        assert curve.metadata["rho_form"] == "expansion"

    def test_single_threshold_matches_curve(self):
        s = Scenario(sigma_theta_deg=0.5)
        c = derive_constants(s)
        model = build_mftr_model(s.mftr)
        single = coverage_probability(10.0, c, s, model, SMALL_SPEC)
        curve = coverage_curve(s, [10.0], spec=SMALL_SPEC, workers=1)
        assert curve.values[0] == pytest.approx(single, abs=1e-12)

    def test_strong_specular_fading(self):
        s = Scenario(mftr=MftrParams(K=10.0, m=4.0, delta=0.1, mu=3))
        engine = AnalyticEngine(s, spec=SMALL_SPEC, workers=1, show_progress=False)
        assert engine.model.series_ready
        assert retained_terms(engine.model, SMALL_SPEC.series_tol) + s.mftr.mu - 1 <= SMALL_SPEC.l_cap
        curve = engine.evaluate([0.0, 20.0])
        assert np.all((curve.values >= 0) & (curve.values <= 1))
        assert curve.values[0] >= curve.values[1]

    def test_requires_blockage(self):
        with pytest.raises(ValueError, match="alpha"):
            AnalyticEngine(Scenario(lambda_B=0.0, lambda_W=0.0), spec=SMALL_SPEC)


@pytest.mark.slow
class TestBlockageDensity:
    """Fewer blockers also unblock interferers, so high-threshold coverage rises with density."""

    @staticmethod
    def _coverage(gamma_db, **fields):
        engine = AnalyticEngine(Scenario(**fields), workers=1, show_progress=False)
        return float(engine.evaluate([gamma_db]).values[0])

    @pytest.mark.parametrize(
        "field, levels", [("lambda_B", (0.05, 0.1, 0.2)), ("lambda_W", (0.02, 0.04, 0.08))]
    )
    def test_interference_limited_coverage_grows_with_density(self, field, levels):
        values = [self._coverage(40.0, **{field: level}) for level in levels]
        assert np.all(np.diff(values) > 0)

    def test_human_density_barely_matters_at_30_db(self):
        values = [self._coverage(30.0, lambda_B=level) for level in (0.05, 0.1, 0.2)]
        assert max(values) - min(values) < 0.005


@pytest.mark.slow
class TestAgainstSimulation:
    def test_laplace_transform(self, constants, scenario, model):
        setup = TrialSetup.build(scenario, constants, model, "gaussian")
        s_val = _natural_scale(constants, scenario)
        analytic = laplace_interference(s_val, D0, constants, scenario, model)
        empirical = empirical_laplace(
            s_val, D0, 50_000, stream_rng(11, 0), constants, scenario, setup
        )
        assert empirical == pytest.approx(analytic, abs=0.01)

    def test_conditional_coverage(self, constants, scenario, model, grid):
        setup = TrialSetup.build(scenario, constants, model, "gaussian")
        gamma = 10 ** 2.5
        analytic = conditional_coverage(1.0, D0, gamma, constants, scenario, model, grid=grid)
        simulated = simulate_conditional_coverage(
            1.0, D0, gamma, 50_000, stream_rng(11, 1), constants, scenario, setup
        )
        assert simulated == pytest.approx(analytic, abs=0.02)

    @pytest.mark.parametrize("sigma_deg", [0.0, 0.5, 1.5])
    def test_coverage_curve(self, sigma_deg):
        s = Scenario(sigma_theta_deg=sigma_deg)
        grid_db = np.array([-10.0, 0.0, 10.0, 20.0, 30.0, 40.0])
        analytic = AnalyticEngine(s, workers=1, show_progress=False).evaluate(grid_db)
        simulated = estimate_coverage(s, grid_db, 20_000, seed=5, blockage_mode="thinned", workers=1)
        # large pointing errors widen the gap below 10 dB
        tol = np.where((sigma_deg >= 1.5) & (grid_db < 10.0), 0.05, 0.03)
        assert np.all(np.abs(simulated.values - analytic.values) <= tol)
