import numpy as np
import pytest

from core.errors import InvalidFieldError
from fields.grid import (
    BoundaryTrace,
    Grid,
    ScalarField,
    TensorField,
    VectorField,
    extend_even_odd,
    extend_odd,
    from_spectral,
    l2_norm,
    restrict_to_half,
    spectral_l2_norm,
    to_spectral,
)
from fields.spectral import (
    curl,
    d_tangential,
    d_vertical,
    divergence,
    frac_laplacian_half,
    hilbert,
    laplacian,
    perp_gradient,
    poisson_semigroup,
    second_difference,
)


class TestGrid:
    def test_rejects_non_power_of_two_samples(self):
        with pytest.raises(InvalidFieldError):
            Grid(1.0, 12, 1.0, 17)

    def test_rejects_short_columns(self):
        with pytest.raises(InvalidFieldError):
            Grid(1.0, 8, 1.0, 8)

    @pytest.mark.parametrize("L1, H", [(-1.0, 1.0), (1.0, 0.0)])
    def test_rejects_nonpositive_extent(self, L1, H):
        with pytest.raises(InvalidFieldError):
            Grid(L1, 8, H, 9)

    def test_geometry(self, grid):
        assert grid.shape == (65, 32)
        assert grid.h2 == pytest.approx(4.0 / 64)
        assert grid.x2[0] == 0.0
        assert grid.x2[-1] == pytest.approx(4.0)
        assert grid.n_modes == 17
        assert np.sum(grid.weights) == pytest.approx(grid.H)

    def test_nyquist_mode_has_no_derivative(self, grid):
        assert np.all(grid.ik[grid.nyquist] == 0.0)
        assert not grid.dealias_mask[grid.nyquist].any()
        assert grid.dealias_mask[0]

    def test_doubled_strip_shares_the_wall_node(self, grid):
        doubled = grid.doubled()
        assert doubled.N2 == 2 * grid.N2 - 1
        assert doubled.origin == -grid.H
        assert doubled.h2 == pytest.approx(grid.h2)
        assert doubled.x2[grid.N2 - 1] == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(InvalidFieldError):
            doubled.doubled()

    def test_refined(self, grid):
        finer = grid.refined(vertical=2, horizontal=2)
        assert finer.N1 == 64
        assert finer.N2 == 129
        assert finer.h2 == pytest.approx(grid.h2 / 2)

    def test_grids_compare_by_parameters(self, grid):
        assert grid == Grid(2.0 * np.pi, 32, 4.0, 65)
        assert hash(grid) == hash(Grid(2.0 * np.pi, 32, 4.0, 65))


class TestScalarField:
    def test_values_are_read_only(self, grid):
        field = ScalarField.zeros(grid)
        with pytest.raises(ValueError):
            field.values[0, 0] = 1.0

    def test_rejects_non_finite_values(self, grid):
        values = grid.zeros()
        values[3, 3] = np.nan
        with pytest.raises(InvalidFieldError):
            ScalarField(grid, values)

    def test_rejects_wrong_shape(self, grid):
        with pytest.raises(InvalidFieldError):
            ScalarField(grid, np.zeros((3, 3)))

    def test_arithmetic_with_fields_and_scalars(self, grid):
        ones = ScalarField(grid, np.ones(grid.shape))
        result = 2.0 * ones + ones - 1.0
        np.testing.assert_allclose(result.values, 2.0)
        np.testing.assert_allclose((-ones).values, -1.0)

    def test_fields_on_different_grids_do_not_mix(self, grid):
        with pytest.raises(InvalidFieldError):
            ScalarField.zeros(grid) + ScalarField.zeros(grid.refined())

    def test_constant_has_its_value_as_mean_coefficient(self, grid):
        field = ScalarField(grid, np.full(grid.shape, 3.0))
        np.testing.assert_allclose(field.spectral[:, 0], 3.0)
        np.testing.assert_allclose(field.spectral[:, 1:], 0.0, atol=1e-14)

    def test_inverse_transform(self, grid, rng):
        field = ScalarField(grid, rng.standard_normal(grid.shape))
        back = from_spectral(grid, to_spectral(field))
        np.testing.assert_allclose(back.values, field.values, atol=1e-12)

    def test_parseval(self, grid, rng):
        field = ScalarField(grid, rng.standard_normal(grid.shape))
        assert spectral_l2_norm(field) == pytest.approx(l2_norm(field), rel=1e-12)

    def test_norm_of_constant(self, grid):
        field = ScalarField(grid, np.ones(grid.shape))
        assert l2_norm(field) == pytest.approx(np.sqrt(grid.L1 * grid.H))

    def test_trace_is_first_row(self, grid):
        X1, X2 = grid.mesh()
        field = ScalarField(grid, np.cos(X1) + X2)
        assert isinstance(field.wall(), BoundaryTrace)
        np.testing.assert_allclose(field.wall().values, np.cos(grid.x1))


class TestVectorAndTensorFields:
    def test_speed_is_euclidean(self, grid):
        u = VectorField.from_arrays(
            grid, np.full(grid.shape, 3.0), np.full(grid.shape, 4.0)
        )
        assert u.sup() == pytest.approx(5.0)

    def test_outer_product_is_symmetric(self, grid, rng):
        u = VectorField.from_arrays(
            grid, rng.standard_normal(grid.shape), rng.standard_normal(grid.shape)
        )
        F = TensorField.outer(u, scale=-1.0)
        assert F.is_symmetric()
        np.testing.assert_allclose(F.F11.values, -u.u1.values**2)


class TestExtensions:
    def test_even_odd_extension_requires_no_penetration(self, grid):
        X1, X2 = grid.mesh()
        u = VectorField.from_arrays(grid, np.sin(X1) * X2, np.ones(grid.shape))
        with pytest.raises(InvalidFieldError):
            extend_even_odd(u)

    def test_even_odd_parity_and_restriction(self, grid):
        X1, X2 = grid.mesh()
        u = VectorField.from_arrays(
            grid, np.cos(X1) * X2 * np.exp(-X2), np.sin(X1) * X2**2
        )
        ext = extend_even_odd(u)
        n = grid.N2
        np.testing.assert_allclose(ext.u1.values[n - 1 :: -1], u.u1.values)
        np.testing.assert_allclose(ext.u2.values[n - 1 :: -1], -u.u2.values)

        half = restrict_to_half(ext)
        assert half.grid == grid
        np.testing.assert_allclose(half.u1.values, u.u1.values)
        np.testing.assert_allclose(half.u2.values, u.u2.values)

    def test_extended_stream_velocity_is_divergence_free(self, grid):
        X1, X2 = grid.mesh()
        psi = ScalarField(grid, np.sin(X1) * X2**2 * np.exp(-X2))
        ext = extend_even_odd(perp_gradient(psi))
        residual = np.abs(divergence(ext).values)
        assert residual.max() <= 1e-10
        assert residual[grid.N2 - 1].max() <= 1e-10

    def test_uniform_flow_extends_unchanged(self, grid):
        u = VectorField.from_arrays(grid, np.ones(grid.shape), grid.zeros())
        ext = extend_even_odd(u)
        np.testing.assert_array_equal(ext.u1.values, 1.0)
        np.testing.assert_array_equal(ext.u2.values, 0.0)
        assert divergence(ext).sup() <= 1e-12

    def test_wall_row_derivative_matches_the_half(self, grid):
        X1, X2 = grid.mesh()
        f = ScalarField(grid, np.cos(X1) * X2**2 * np.exp(-X2))
        n = grid.N2
        odd = d_vertical(extend_odd(f)).values
        np.testing.assert_allclose(odd[n - 1], d_vertical(f).values[0], atol=1e-12)
        np.testing.assert_allclose(odd[n:], d_vertical(f).values[1:], atol=1e-12)
        u = VectorField.from_arrays(grid, f.values, grid.zeros())
        even = d_vertical(extend_even_odd(u).u1).values
        np.testing.assert_allclose(even[n - 1], 0.0, atol=1e-12)

    def test_odd_extension(self, grid):
        X1, X2 = grid.mesh()
        f = ScalarField(grid, np.sin(X1) * X2)
        ext = extend_odd(f)
        np.testing.assert_allclose(ext.values[: grid.N2 - 1], -f.values[:0:-1])
        np.testing.assert_allclose(restrict_to_half(ext).values, f.values)

    def test_restriction_needs_a_doubled_strip(self, grid):
        with pytest.raises(InvalidFieldError):
            restrict_to_half(ScalarField.zeros(grid))


class TestSpectralOperators:
    def test_tangential_derivative_is_exact_on_resolved_modes(self, grid):
        X1, X2 = grid.mesh()
        f = ScalarField(grid, np.sin(3 * X1) * X2)
        np.testing.assert_allclose(
            d_tangential(f).values, 3 * np.cos(3 * X1) * X2, atol=1e-10
        )

    def test_vertical_derivative_is_exact_for_quadratics(self, grid):
        X1, X2 = grid.mesh()
        f = ScalarField(grid, X2**2 + np.cos(X1))
        np.testing.assert_allclose(d_vertical(f).values, 2 * X2, atol=1e-10)

    def test_second_difference_is_exact_for_quadratics(self, grid):
        values = np.outer(grid.x2**2, np.ones(4))
        np.testing.assert_allclose(second_difference(values, grid.h2), 2.0, atol=1e-8)

    def test_laplacian(self, grid):
        X1, X2 = grid.mesh()
        f = ScalarField(grid, np.sin(X1) * X2**2)
        expected = -np.sin(X1) * X2**2 + 2 * np.sin(X1)
        np.testing.assert_allclose(laplacian(f).values, expected, atol=1e-8)

    def test_curl_of_stream_velocity_is_minus_laplacian(self, grid):
        X1, X2 = grid.mesh()
        psi = ScalarField(grid, np.sin(X1) * X2**2)
        np.testing.assert_allclose(
            curl(perp_gradient(psi)).values, -laplacian(psi).values, atol=1e-8
        )

    def test_stream_velocity_is_divergence_free(self, grid):
        X1, X2 = grid.mesh()
        psi = ScalarField(grid, np.sin(2 * X1) * np.exp(-X2))
        assert divergence(perp_gradient(psi)).sup() < 1e-10

    def test_trace_multipliers(self, grid):
        cos2 = BoundaryTrace.from_function(grid, lambda x: np.cos(2 * x))
        cos1 = BoundaryTrace.from_function(grid, np.cos)
        np.testing.assert_allclose(
            frac_laplacian_half(cos2).values, 2 * np.cos(2 * grid.x1), atol=1e-12
        )
        np.testing.assert_allclose(hilbert(cos1).values, np.sin(grid.x1), atol=1e-12)
        np.testing.assert_allclose(
            poisson_semigroup(cos1, 0.5).values,
            np.exp(-0.5) * np.cos(grid.x1),
            atol=1e-12,
        )

    def test_poisson_semigroup_rejects_negative_depth(self, grid):
        with pytest.raises(InvalidFieldError):
            poisson_semigroup(BoundaryTrace.zeros(grid), -0.1)
