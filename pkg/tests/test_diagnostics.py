import numpy as np
import pytest

from core.config import InitialConfig
from core.errors import InvalidFieldError
from diagnostics.benches import (
    expected_slope,
    operator_scaling_bench,
    rough_trace,
    rough_velocity,
    smoothed_square_wave,
)
from diagnostics.fits import dyadic_times, observed_order, slope_fit
from diagnostics.monitors import (
    conserved_trace_monitor,
    leakage_fraction,
    positivity_monitor,
    spatial_decay_fit,
    temporal_decay_series,
    top_leakage_monitor,
)
from diagnostics.smoothing import smoothing_rate_check
from dynamics.state import RunHistory, SimState
from fields.grid import ScalarField
from scenarios.presets import blob, vortex_pair


class TestSlopeFit:
    def test_recovers_a_power_law(self):
        t = dyadic_times(1e-3, 1e-1, per_octave=2)
        fit = slope_fit(t, 3.0 * t**-0.5)
        assert fit.exponent == pytest.approx(-0.5)
        assert fit.intercept == pytest.approx(np.log(3.0))
        assert fit.residual < 1e-10
        assert fit.samples == t.size
        assert fit.within(-0.5, 0.01)
        assert not fit.within(-1.0, 0.1)

    def test_needs_enough_samples(self):
        with pytest.raises(InvalidFieldError):
            slope_fit([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])

    def test_needs_positive_values(self):
        t = np.arange(1.0, 9.0)
        with pytest.raises(InvalidFieldError):
            slope_fit(t, t - 1.0)

    def test_dyadic_times(self):
        np.testing.assert_allclose(
            dyadic_times(1e-3, 8e-3), [1e-3, 2e-3, 4e-3, 8e-3]
        )
        assert dyadic_times(1e-3, 8e-3, per_octave=2).size == 7
        with pytest.raises(InvalidFieldError):
            dyadic_times(1e-2, 1e-3)

    def test_observed_order(self):
        h = np.array([0.1, 0.05, 0.025])
        assert observed_order(h, 7.0 * h**2) == pytest.approx(2.0)


class TestBenches:
    def test_expected_slopes(self):
        assert expected_slope("T") == (-0.5, 0.1)
        assert expected_slope("boundary_k1l0") == (-1.0, 0.15)
        assert expected_slope("boundary_k1l1") == (-1.5, 0.15)
        assert expected_slope("abs_d1_T_divF") == (None, None)
        with pytest.raises(InvalidFieldError):
            expected_slope("T_d3")

    def test_square_wave_is_bounded(self, grid):
        wave = smoothed_square_wave(grid.x1, grid.L1, grid.dx1)
        assert np.abs(wave).max() <= 1.0 + 1e-12
        assert wave.max() > 0.9

    def test_rough_data(self, grid):
        u = rough_velocity(grid)
        assert u.u2.sup() == 0.0
        assert u.u1.wall().sup() == 0.0
        assert u.u1.sup() > 0.5
        assert rough_trace(grid).values.shape == (grid.N1,)

    def test_identity_bench_is_flat(self, grid):
        times = dyadic_times(1e-3, 1.28e-1)
        result = operator_scaling_bench("identity", rough_velocity(grid), times)
        assert result.fit.exponent == pytest.approx(0.0, abs=1e-10)
        assert result.passed
        assert result.to_dict()["operator"] == "identity"

    def test_data_must_match_the_operator(self, grid):
        times = dyadic_times(1e-3, 1.28e-1)
        with pytest.raises(InvalidFieldError):
            operator_scaling_bench("T", rough_trace(grid), times)
        with pytest.raises(InvalidFieldError):
            operator_scaling_bench("boundary_k0l0", rough_velocity(grid), times)


class TestMonitors:
    def test_positivity(self, grid, pair_config):
        positive = blob(grid, InitialConfig(preset="blob", height=1.0, width=0.5))
        _, signed = vortex_pair(grid, pair_config)
        assert positivity_monitor(positive)
        assert not positivity_monitor(signed)

    def test_empty_history(self):
        report = conserved_trace_monitor(RunHistory())
        assert report.records == 0
        assert report.max_drift == 0.0
        assert top_leakage_monitor(RunHistory()) == 0.0

    def test_steady_history_has_no_drift(self, grid, pair_config):
        state = SimState.initial(vortex_pair(grid, pair_config)[1])
        history = RunHistory()
        history.record(state)
        history.record(state)
        report = conserved_trace_monitor(history)
        assert report.records == 2
        assert report.max_drift == 0.0
        assert top_leakage_monitor(history) == 0.0
        series = temporal_decay_series(history)
        assert set(series) == {"t", "sup_omega", "sup_d1_omega"}

    def test_compact_vorticity_does_not_leak(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        assert leakage_fraction(omega) == 0.0

    def test_spatial_decay_exponent(self, grid):
        X1, X2 = grid.mesh()
        profile = np.where(X2 > 0, X2, 1.0) ** -2.0
        fit = spatial_decay_fit(ScalarField(grid, profile))
        assert fit.exponent == pytest.approx(-2.0)


def synthetic_history(times: np.ndarray) -> RunHistory:
    history = RunHistory()
    history.times = list(times)
    history.sup_grad_u = list(times**-0.5)
    history.sup_grad2_u = list(times**-1.0)
    history.sup_dt_u = list(times**-1.0)
    return history


class TestSmoothingRates:
    def test_heat_like_rates_pass(self):
        history = synthetic_history(np.geomspace(1e-4, 0.2, 400))
        report = smoothing_rate_check(history, 1e-3, 1e-1)
        assert report.raw[1].exponent == pytest.approx(-0.5)
        assert report.raw[2].exponent == pytest.approx(-1.0)
        for fit in report.compensated.values():
            assert fit.exponent == pytest.approx(0.0, abs=1e-10)
        assert report.passed
        assert report.to_dict()["passed"] is True

    def test_faster_blow_up_fails(self):
        history = synthetic_history(np.geomspace(1e-4, 0.2, 400))
        history.sup_grad2_u = list(np.geomspace(1e-4, 0.2, 400) ** -2.0)
        assert not smoothing_rate_check(history, 1e-3, 1e-1).passed

    def test_needs_enough_records(self):
        history = synthetic_history(np.array([1e-3, 2e-3, 4e-3]))
        with pytest.raises(InvalidFieldError):
            smoothing_rate_check(history, 1e-3, 1e-1)
