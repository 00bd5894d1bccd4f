import numpy as np
import pytest
from scipy import integrate

from diagnostics.fits import observed_order
from fields.grid import BoundaryTrace, Grid, ScalarField, TensorField, VectorField
from fields.spectral import d_tangential, laplacian, perp_gradient
from operators.biot_savart import biot_savart
from operators.pressure import (
    doubled_identity_residual,
    harmonic_weighted_bound,
    pF_solve,
    pH_gradient,
    pH_potential,
    pressure_total_gradient,
)
from scenarios.presets import vortex_pair

REFINED_N2 = (65, 129, 257)


def refined_grids(N1: int = 16) -> list[Grid]:
    return [Grid(2.0 * np.pi, N1 * 2**i, 4.0, n) for i, n in enumerate(REFINED_N2)]


def bump(x):
    """x^2 exp(-x^2): vanishes with its slope on the wall."""
    return x**2 * np.exp(-(x**2))


def bump_slope(x):
    return (2.0 * x - 2.0 * x**3) * np.exp(-(x**2))


def shear_stress(grid: Grid) -> TensorField:
    """F12 = F21 = sin(x1) x2^2 exp(-x2^2), zero diagonal."""
    zero = ScalarField.zeros(grid)
    off = ScalarField.from_function(grid, lambda x1, x2: np.sin(x1) * bump(x2))
    return TensorField(zero, off, off, zero)


def neumann_profile(x: float) -> float:
    """
    P with P'' - P = 2 bump', P'(0) = 0 and decay, by the even image
    Green's function; pF of `shear_stress` is cos(x1) P(x2).
    """

    def integrand(y):
        return -(np.exp(-abs(x - y)) + np.exp(-(x + y))) * bump_slope(y)

    pieces = [(0.0, x), (x, 12.0)] if x > 0.0 else [(0.0, 12.0)]
    return sum(
        integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-12)[0]
        for a, b in pieces
    )


@pytest.fixture
def wall_data(grid) -> BoundaryTrace:
    return BoundaryTrace.from_function(grid, lambda x: np.cos(2 * x))


class TestHarmonicPressure:
    def test_wall_limits(self, grid, wall_data):
        grad = pH_gradient(wall_data)
        np.testing.assert_allclose(
            grad.u1.wall().values, 2 * np.cos(2 * grid.x1), atol=1e-12
        )
        np.testing.assert_allclose(
            grad.u2.wall().values, -2 * np.sin(2 * grid.x1), atol=1e-12
        )

    def test_decays_away_from_the_wall(self, grid, wall_data):
        grad = pH_gradient(wall_data)
        row = int(np.searchsorted(grid.x2, 1.0))
        expected = 2 * np.exp(-2 * grid.x2[row]) * np.cos(2 * grid.x1)
        np.testing.assert_allclose(grad.u1.values[row], expected, atol=1e-12)

    def test_potential_has_the_tangential_component(self, wall_data):
        potential = pH_potential(wall_data)
        np.testing.assert_allclose(
            d_tangential(potential).values,
            pH_gradient(wall_data).u1.values,
            atol=1e-10,
        )

    def test_weighted_bound_is_finite(self, wall_data):
        bound = harmonic_weighted_bound(wall_data)
        assert 0.0 < bound < np.inf

    def test_potential_is_harmonic_to_second_order(self):
        grids = refined_grids()
        residuals = []
        for g in grids:
            potential = pH_potential(BoundaryTrace.from_function(g, np.cos))
            residuals.append(np.abs(laplacian(potential).values[1:-1]).max())
        assert observed_order([g.h2 for g in grids], residuals) >= 1.8

    def test_weighted_bound_is_resolution_stable(self, rng):
        modes = np.arange(1, 5)
        a, b = rng.standard_normal(4), rng.standard_normal(4)

        def band_limited(x):
            return a @ np.cos(np.outer(modes, x)) + b @ np.sin(np.outer(modes, x))

        bounds = [
            harmonic_weighted_bound(BoundaryTrace.from_function(g, band_limited))
            for g in (Grid(2.0 * np.pi, 64, 4.0, 129), Grid(2.0 * np.pi, 128, 4.0, 257))
        ]
        assert bounds[1] == pytest.approx(bounds[0], rel=0.05)


class TestFreePressure:
    def test_zero_tensor_gives_zero_pressure(self, grid):
        parts = pF_solve(TensorField.outer(VectorField.zeros(grid)))
        assert parts.pF.sup() == 0.0
        assert parts.grad_pF.sup() == 0.0

    def test_shear_flow_needs_no_pressure(self, grid):
        profile = np.sin(np.pi * grid.x2 / grid.H)
        u = VectorField.from_arrays(
            grid, np.repeat(profile[:, None], grid.N1, axis=1), np.zeros(grid.shape)
        )
        parts = pF_solve(TensorField.outer(u, scale=-1.0))
        assert parts.grad_pF.sup() < 1e-10

    def test_wall_derivative_is_the_gradient_trace(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        u = biot_savart(omega)
        parts = pF_solve(TensorField.outer(u, scale=-1.0))
        np.testing.assert_allclose(
            parts.wall_d1pF.values, parts.grad_pF.u1.values[0], atol=1e-14
        )

    def test_wall_neumann_residual_is_second_order(self):
        grids = refined_grids()
        residuals = [pF_solve(shear_stress(g)).grad_pF.u2.wall().sup() for g in grids]
        assert residuals[-1] > 0.0
        assert observed_order([g.h2 for g in grids], residuals) >= 1.8

    def test_matches_the_image_green_function(self):
        heights = (0.0, 0.5, 1.0, 2.0)
        exact = np.array([neumann_profile(x) for x in heights])
        grids = refined_grids()
        errors = []
        for g in grids:
            column = pF_solve(shear_stress(g)).pF.values[:, 0]
            rows = [int(round(x / g.h2)) for x in heights]
            errors.append(np.abs(column[rows] - exact).max())
        assert errors[-1] < 1e-2
        assert observed_order([g.h2 for g in grids], errors) >= 1.8


class TestTotalPressure:
    def test_combines_free_and_harmonic_parts(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        u = biot_savart(omega)
        total = pressure_total_gradient(u, omega)
        harmonic = pH_gradient(omega.wall())
        np.testing.assert_allclose(total.grad_pH.u1.values, harmonic.u1.values)
        np.testing.assert_allclose(
            total.grad_p.u2.values,
            total.grad_pF.u2.values + harmonic.u2.values,
            atol=1e-12,
        )

    def test_pressure_of_a_field_is_finite(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        total = pressure_total_gradient(biot_savart(omega), omega)
        assert isinstance(total.pF, ScalarField)
        assert np.isfinite(total.grad_p.sup())


class TestDoubledIdentity:
    def test_vanishes_for_rest(self, grid):
        u = VectorField(ScalarField.zeros(grid), ScalarField.zeros(grid))
        assert doubled_identity_residual(u, ScalarField.zeros(grid)) == 0.0

    def test_is_finite_for_a_vortex_pair(self, grid, pair_config):
        _, omega = vortex_pair(grid, pair_config)
        residual = doubled_identity_residual(biot_savart(omega), omega)
        assert np.isfinite(residual)
        assert residual >= 0.0

    def test_converges_at_second_order(self):
        grids = refined_grids()
        residuals = []
        for g in grids:
            psi = ScalarField.from_function(g, lambda x1, x2: np.sin(x1) * bump(x2))
            omega = ScalarField.from_function(
                g,
                lambda x1, x2: np.sin(x1)
                * (-2.0 + 11.0 * x2**2 - 4.0 * x2**4)
                * np.exp(-(x2**2)),
            )
            residuals.append(doubled_identity_residual(perp_gradient(psi), omega))
        assert observed_order([g.h2 for g in grids], residuals) >= 1.8
