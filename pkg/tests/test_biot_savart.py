import warnings

import numpy as np
import pytest

from core.config import InitialConfig
from core.errors import DomainTruncationWarning, InvalidFieldError
from fields.grid import Grid, ScalarField, l2_norm
from fields.spectral import curl, divergence
from operators.biot_savart import (
    biot_savart,
    stream_function,
    top_leakage,
    trace_functional,
    trace_functional_direct,
    trace_lower_bound,
)
from scenarios.presets import blob, vortex_pair


def pair_on(n2: int, cfg: InitialConfig):
    return vortex_pair(Grid(2.0 * np.pi, 64, 4.0, n2), cfg)


def curl_error(n2: int, cfg: InitialConfig) -> float:
    _, omega = pair_on(n2, cfg)
    return l2_norm(curl(biot_savart(omega)) - omega) / l2_norm(omega)


class TestBiotSavart:
    def test_no_penetration_on_the_wall(self, fine_grid, pair_config):
        _, omega = vortex_pair(fine_grid, pair_config)
        u = biot_savart(omega)
        assert np.all(u.u2.values[0] == 0.0)

    def test_compact_stream_function_gives_no_slip(self, fine_grid, pair_config):
        _, omega = vortex_pair(fine_grid, pair_config)
        u = biot_savart(omega)
        assert u.u1.wall().sup() < 1e-2 * u.sup()

    def test_velocity_is_divergence_free(self, fine_grid, pair_config):
        _, omega = vortex_pair(fine_grid, pair_config)
        u = biot_savart(omega)
        assert divergence(u).sup() < 1e-9 * max(1.0, u.sup())

    def test_stream_function_matches_the_preset(self, pair_config):
        psi, omega = pair_on(257, pair_config)
        recovered = stream_function(omega)
        assert (recovered - psi).sup() < 2e-2 * psi.sup()

    def test_curl_recovers_vorticity(self, pair_config):
        assert curl_error(257, pair_config) < 0.1

    def test_curl_error_shrinks_under_refinement(self, pair_config):
        errors = [curl_error(n2, pair_config) for n2 in (65, 129, 257)]
        assert errors[0] > errors[1] > errors[2]

    def test_warns_when_vorticity_reaches_the_top(self, grid):
        values = np.where(grid.x2[:, None] > 0.95 * grid.H, 1.0, 0.0)
        omega = ScalarField(grid, np.broadcast_to(values, grid.shape))
        assert top_leakage(omega) == 1.0
        with pytest.warns(DomainTruncationWarning):
            biot_savart(omega)

    def test_compact_data_does_not_warn(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        with warnings.catch_warnings():
            warnings.simplefilter("error", DomainTruncationWarning)
            biot_savart(omega)


class TestTraceFunctional:
    @pytest.fixture
    def positive_vorticity(self, grid):
        return blob(grid, InitialConfig(preset="blob", height=1.0, width=0.5))

    def test_vanishes_for_no_slip_vorticity(self, fine_grid, pair_config):
        _, omega = vortex_pair(fine_grid, pair_config)
        assert trace_functional(omega).sup() < 1e-3 * omega.sup()

    def test_positive_for_nonnegative_vorticity(self, positive_vorticity):
        assert trace_functional(positive_vorticity).values.min() > 0.0

    def test_spectral_and_direct_forms_agree(self, positive_vorticity):
        spectral = trace_functional(positive_vorticity)
        direct = trace_functional_direct(positive_vorticity)
        assert (spectral - direct).sup() < 2e-2 * direct.sup()

    def test_lower_bound_holds(self, positive_vorticity):
        bound = trace_lower_bound(positive_vorticity)
        direct = trace_functional_direct(positive_vorticity)
        assert bound > 0.0
        assert bound <= direct.values.min() * (1.0 + 1e-12)

    def test_lower_bound_rejects_signed_vorticity(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        with pytest.raises(InvalidFieldError):
            trace_lower_bound(omega)
