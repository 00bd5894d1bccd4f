import numpy as np
import pytest

from core.errors import InvalidFieldError
from dynamics.shear import c2_residual, shear_flow_solve
from dynamics.state import ForcingSeries, SimState
from fields.grid import Grid, ScalarField
from scenarios.shear_counterexample import image_heat_flow


@pytest.fixture
def column() -> Grid:
    return Grid(2.0 * np.pi, 8, 1.0, 129)


class TestShearFlowSolve:
    def test_unforced_eigenmode_decays_at_its_rate(self, column):
        # sin(pi x2 / 2H) meets both the no-slip wall and the flat top
        u0 = np.sin(0.5 * np.pi * column.x2 / column.H)
        flow = shear_flow_solve(
            column, ForcingSeries.constant(0.0, 0.1), u0, 1e-3, 0.1
        )
        rate = (0.5 * np.pi / column.H) ** 2
        np.testing.assert_allclose(
            flow.profiles[-1], np.exp(-rate * 0.1) * u0, atol=1e-4
        )
        assert flow.profiles.shape == (101, column.N2)
        assert flow.dt == pytest.approx(1e-3)

    def test_matches_the_image_kernel_near_the_wall(self):
        column = Grid(2.0 * np.pi, 8, 1.0, 1025)
        t = 1e-2
        u0 = np.sin(np.pi * column.x2)
        flow = shear_flow_solve(column, ForcingSeries.constant(0.0, t), u0, 1e-4, t)
        near = np.flatnonzero(column.x2 <= 0.25)[::16]
        exact = image_heat_flow(lambda y: np.sin(np.pi * y), 1.0, t, column.x2[near])
        assert exact[0] == 0.0
        np.testing.assert_allclose(
            exact, np.exp(-(np.pi**2) * t) * u0[near], atol=1e-6
        )
        np.testing.assert_allclose(flow.profiles[-1][near], exact, atol=1e-5)

    def test_wall_stays_at_rest(self, column):
        u0 = np.sin(np.pi * column.x2 / column.H)
        flow = shear_flow_solve(
            column, ForcingSeries.constant(1.0, 0.05), u0, 1e-3, 0.05
        )
        assert np.all(flow.profiles[:, 0] == 0.0)
        np.testing.assert_allclose(flow.forcing_mid, 1.0)

    def test_forcing_is_sampled_at_midpoints(self, column):
        series = ForcingSeries(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
        flow = shear_flow_solve(column, series, np.zeros(column.N2), 1e-2, 0.02)
        np.testing.assert_allclose(flow.forcing_mid, [0.01, 0.03])

    def test_rejects_a_slipping_profile(self, column):
        with pytest.raises(InvalidFieldError):
            shear_flow_solve(
                column, ForcingSeries.constant(0.0), np.ones(column.N2), 1e-3, 0.01
            )

    def test_rejects_a_profile_of_the_wrong_length(self, column):
        with pytest.raises(InvalidFieldError):
            shear_flow_solve(
                column, ForcingSeries.constant(0.0), np.zeros(5), 1e-3, 0.01
            )

    def test_velocity_is_uniform_along_the_wall(self, column):
        u0 = np.sin(np.pi * column.x2 / column.H)
        flow = shear_flow_solve(
            column, ForcingSeries.constant(0.0, 0.01), u0, 1e-3, 0.01
        )
        u = flow.velocity(0)
        np.testing.assert_allclose(u.u1.values[:, 3], u0)
        assert u.u2.sup() == 0.0


class TestC2Residual:
    def test_forced_shear_leaves_the_forcing_as_residual(self, column):
        u0 = 0.5 * np.sin(np.pi * column.x2 / column.H)
        flow = shear_flow_solve(
            column, ForcingSeries.constant(1.0, 0.01), u0, 1e-3, 0.01
        )
        stats = c2_residual(flow)
        assert stats.samples == 10
        assert stats.r1_minus_f_sup < 1e-6
        assert stats.r2_sup < 1e-10
        assert stats.r1_sup == pytest.approx(1.0, abs=1e-6)

    def test_unforced_shear_has_no_residual(self, column):
        u0 = np.sin(np.pi * column.x2 / column.H)
        flow = shear_flow_solve(
            column, ForcingSeries.constant(0.0, 0.01), u0, 1e-3, 0.01
        )
        assert c2_residual(flow).sup < 1e-6

    def test_needs_two_snapshots(self, column):
        state = SimState.initial(ScalarField.zeros(column))
        with pytest.raises(InvalidFieldError):
            c2_residual([state])

    def test_state_sequences_report_no_forcing_gap(self, column):
        states = [
            SimState.initial(ScalarField.zeros(column)),
            SimState.initial(ScalarField.zeros(column), t=0.01),
        ]
        stats = c2_residual(states)
        assert np.isnan(stats.r1_minus_f_sup)
        assert stats.sup == 0.0
