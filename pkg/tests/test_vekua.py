"""
Tests for finite differences, the antiderivative operator and transfer formulas.
"""

from dataclasses import replace

import numpy as np
import pytest

from planar_beltrami.beltrami import transfer_context
from planar_beltrami.errors import CompatibilityError, OutOfDomain, ResidualError
from planar_beltrami.formal_powers import first_kind
from planar_beltrami.profile import ConductivityPair
from planar_beltrami.vekua import (
    ComplexField,
    ProbeGrid,
    TransferContext,
    abar,
    assoc_residual,
    casirot_residual,
    compute_q1,
    dbar,
    divergence_form,
    fit_kernel_constant,
    maineq_residual,
    partial_x,
    partial_y,
    partials,
    roundtrip_defect,
    split_solution,
    transfer_u_to_v,
    transfer_v_to_u,
    vekua_residual,
)

SQUARE = ProbeGrid.rectangle((-0.5, 0.5, 5), (-0.5, 0.5, 5))


def ones(x, y):
    return np.ones(np.broadcast(x, y).shape)


@pytest.fixture
def harmonic_ctx() -> TransferContext:
    """Laplace equation with u0 = 1 on [-0.5, 0.5]^2."""
    return TransferContext(ConductivityPair.harmonic(), u0=ones, grid=SQUARE)


class TestProbeGrid:
    """Test ProbeGrid."""

    def test_rectangle(self):
        """Should mesh (len(y), len(x)) points."""
        grid = ProbeGrid.rectangle((0.0, 1.0, 3), (-1.0, 1.0, 5))
        X, Y = grid.points
        assert grid.shape == (5, 3) == X.shape == Y.shape
        assert X[0, -1] == 1.0
        assert Y[-1, 0] == 1.0

    def test_dict_roundtrip(self):
        """to_dict and from_config are inverse."""
        grid = ProbeGrid.rectangle((-0.4, 0.4, 9), (0.1, 0.3, 3))
        again = ProbeGrid.from_config(grid.to_dict())
        np.testing.assert_array_equal(again.x, grid.x)
        np.testing.assert_array_equal(again.y, grid.y)

    def test_invalid(self):
        """Should reject fewer than two points and empty ranges."""
        with pytest.raises(ValueError):
            ProbeGrid.rectangle((0.0, 1.0, 1), (0.0, 1.0, 3))
        with pytest.raises(ValueError):
            ProbeGrid.rectangle((1.0, 0.0, 3), (0.0, 1.0, 3))


class TestFiniteDifferences:
    """Test partials, dbar and divergence_form."""

    def test_partials(self):
        """Fourth-order differences of sin(x) cos(y)."""
        X, Y = SQUARE.points
        fx, fy = partials(lambda x, y: np.sin(x) * np.cos(y), X, Y)
        np.testing.assert_allclose(fx, np.cos(X) * np.cos(Y), atol=1e-9)
        np.testing.assert_allclose(fy, -np.sin(X) * np.sin(Y), atol=1e-9)
        np.testing.assert_allclose(partial_x(lambda x, y: x**3, X, Y), 3 * X**2, atol=1e-10)
        np.testing.assert_allclose(partial_y(lambda x, y: x * y**2, X, Y), 2 * X * Y, atol=1e-10)

    def test_dbar_of_conjugate(self):
        """d/dzbar of conj(z) is 1 and of z is 0."""
        X, Y = SQUARE.points
        np.testing.assert_allclose(dbar(lambda x, y: x - 1j * y, X, Y), 1.0, atol=1e-12)
        np.testing.assert_allclose(dbar(lambda x, y: (x + 1j * y) ** 3, X, Y), 0.0, atol=1e-10)

    def test_constant_field_broadcasts(self):
        """A field returning a scalar has vanishing partials."""
        fx, fy = partials(lambda x, y: 2.0, np.zeros(3), np.zeros(3))
        assert fx.shape == (3,)
        np.testing.assert_allclose(fx, 0.0, atol=1e-12)
        np.testing.assert_allclose(fy, 0.0, atol=1e-12)

    def test_divergence_form(self):
        """div(grad(x^2 + y^2)) = 4, div(y grad x^2) = 2y."""
        X, Y = SQUARE.points
        lap = divergence_form(ones, lambda x, y: x**2 + y**2, X, Y)
        np.testing.assert_allclose(lap, 4.0, atol=1e-7)
        weighted = divergence_form(lambda x, y: y, lambda x, y: x**2, X, Y)
        np.testing.assert_allclose(weighted, 2 * Y, atol=1e-7)

    def test_divergence_form_analytic_gradient(self):
        """An analytic inner gradient gives the same operator."""
        X, Y = SQUARE.points
        value = divergence_form(
            ones, lambda x, y: x * y, X, Y, u_grad=lambda x, y: (y, x)
        )
        np.testing.assert_allclose(value, 0.0, atol=1e-9)


class TestComplexField:
    """Test ComplexField."""

    def test_dz_and_dbar(self):
        """z^2 is holomorphic with derivative 2z."""
        X, Y = SQUARE.points
        square = ComplexField(lambda x, y: (x + 1j * y) ** 2)
        np.testing.assert_allclose(square.dz(X, Y), 2 * (X + 1j * Y), atol=1e-10)
        np.testing.assert_allclose(square.dbar(X, Y), 0.0, atol=1e-10)

    def test_analytic_partials_preferred(self):
        """A supplied gradient is used as is."""
        field = ComplexField(lambda x, y: x + 0j, grad=lambda x, y: (ones(x, y) * 7, ones(x, y)))
        fx, _ = field.partials(np.zeros(2), np.zeros(2))
        assert np.all(fx == 7)

    def test_from_parts(self):
        """Real and imaginary parts combine."""
        field = ComplexField.from_parts(lambda x, y: x, lambda x, y: y)
        assert field(1.0, 2.0) == 1 + 2j

    def test_sample_rejects_non_finite(self):
        """Sampling a field with infinite values raises ValueError."""
        grid = ProbeGrid.rectangle((-1.0, 1.0, 3), (-1.0, 1.0, 3))
        with pytest.raises(ValueError):
            ComplexField(lambda x, y: np.where(x > 0, np.inf, 0.0) + 0j).sample(grid)


class TestAbar:
    """Test the antiderivative operator."""

    @staticmethod
    def potential(x, y):
        return x**2 * y + np.sin(y) + x

    @staticmethod
    def phi(x, y):
        """zbar-derivative of the potential."""
        return 0.5 * ((2 * x * y + 1) + 1j * (x**2 + np.cos(y)))

    def test_recovers_potential(self):
        """abar(Phi) = potential - potential(base) + c."""
        base = (0.1, 0.2)
        recovered = abar(self.phi, base, c=0.5, grid=SQUARE)
        X, Y = SQUARE.points
        expected = self.potential(X, Y) - self.potential(*base) + 0.5
        np.testing.assert_allclose(recovered(X, Y), expected, atol=1e-10)
        assert recovered(*base) == pytest.approx(0.5, abs=1e-14)

    def test_linear_phi(self):
        """Phi = y + i x integrates to 2xy from the origin."""
        recovered = abar(lambda x, y: y + 1j * x, (0.0, 0.0), grid=SQUARE)
        X, Y = SQUARE.points
        np.testing.assert_allclose(recovered(X, Y), 2 * X * Y, atol=1e-14)

    def test_base_points_differ_by_constant(self):
        """Moving the base point shifts the antiderivative by a constant."""
        X, Y = SQUARE.points
        first = abar(self.phi, (0.0, 0.0), grid=SQUARE)(X, Y)
        second = abar(self.phi, (0.3, -0.2), grid=SQUARE)(X, Y)
        shift = first - second
        assert np.ptp(shift) < 1e-12
        assert shift.mean() == pytest.approx(self.potential(0.3, -0.2) - self.potential(0, 0))

    def test_incompatible(self):
        """Phi = i x has compatibility residual 1."""
        with pytest.raises(CompatibilityError) as excinfo:
            abar(lambda x, y: 1j * x, (0.0, 0.0), grid=SQUARE)
        assert excinfo.value.residual == pytest.approx(1.0, abs=1e-8)

    def test_casirot_residual(self):
        """The compatibility residual of an exact zbar-derivative vanishes."""
        assert casirot_residual(self.phi, SQUARE) < 1e-9

    def test_base_outside_grid(self):
        """The base point must lie in the grid rectangle."""
        with pytest.raises(OutOfDomain):
            abar(self.phi, (2.0, 0.0), grid=SQUARE)

    def test_without_grid_skips_check(self):
        """No grid means no compatibility check."""
        field = abar(lambda x, y: 1j * x, (0.0, 0.0))
        assert field(0.0, 0.0) == 0.0


class TestHarmonicTransfer:
    """For p = 1, q = 0, u0 = 1 the transfers are harmonic conjugation."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_conjugate_of_real_part(self, harmonic_ctx, n):
        """Re z^n -> Im z^n up to a constant."""
        v = transfer_u_to_v(harmonic_ctx, lambda x, y: ((x + 1j * y) ** n).real)
        X, Y = SQUARE.points
        defect = v(X, Y) - ((X + 1j * Y) ** n).imag
        assert np.max(np.abs(defect - defect.mean())) < 1e-10

    def test_back_to_real_part(self, harmonic_ctx):
        """2xy -> x^2 - y^2."""
        u = transfer_v_to_u(harmonic_ctx, lambda x, y: 2 * x * y)
        X, Y = SQUARE.points
        np.testing.assert_allclose(u(X, Y), X**2 - Y**2, atol=1e-10)

    def test_rejects_non_solution(self, harmonic_ctx):
        """x^2 + y^2 is not harmonic."""
        with pytest.raises(ResidualError) as excinfo:
            transfer_u_to_v(harmonic_ctx, lambda x, y: x**2 + y**2)
        assert excinfo.value.residual == pytest.approx(4.0, rel=1e-6)

    def test_q1_vanishes(self, harmonic_ctx):
        """q1 = 0 for the Laplace equation with u0 = 1."""
        X, Y = SQUARE.points
        np.testing.assert_allclose(compute_q1(harmonic_ctx)(X, Y), 0.0, atol=1e-12)

    def test_fit_kernel_constant(self, harmonic_ctx):
        """u_back = u + 2 u0 gives kappa = 2 with no residual."""

        def u(x, y):
            return x * y

        kappa, residual = fit_kernel_constant(harmonic_ctx, u, lambda x, y: u(x, y) + 2.0)
        assert kappa == pytest.approx(2.0, abs=1e-14)
        assert residual < 1e-14


class TestBeltramiTransfer:
    """Transfers in the (1/alpha, alpha) context of the example profile."""

    @pytest.fixture(scope="class")
    def ctx(self, example_g):
        return transfer_context(example_g, ProbeGrid.rectangle((-0.2, 0.2, 4), (-0.2, 0.2, 4)))

    def test_context(self, ctx, example_g):
        """f = sqrt(p) u0 = f0 and the base defaults to the grid centre."""
        X, Y = ctx.grid.points
        np.testing.assert_allclose(ctx.f(X, Y), example_g.f0(Y), rtol=1e-13)
        assert ctx.base == (0.0, 0.0)

    def test_elements_solve_main_equation(self, ctx, example_elements):
        """Every element solves (div p grad + q) u = 0."""
        for element in example_elements[:7]:
            assert maineq_residual(ctx.pair, element, ctx.grid) < 1e-6

    @pytest.mark.parametrize("index", [1, 4, 5])
    def test_roundtrip(self, ctx, example_elements, index):
        """u -> v -> u returns u plus a multiple of u0."""
        _, residual = roundtrip_defect(ctx, example_elements[index])
        assert residual < 1e-6

    def test_split_first_kind_solution(self, example_g, example_powers):
        """W = f0 Re Z(2, 1) + i Im Z(2, 1)/f0 splits into solutions of both equations."""
        grid = ProbeGrid.rectangle((-0.5, 0.5, 7), (-0.5, 0.5, 7))
        ctx = transfer_context(example_g, grid)
        u, v = split_solution(ctx, lambda x, y: first_kind(example_powers, 1.0, 2, x + 1j * y))
        assert maineq_residual(ctx.pair, u, grid) < 1e-4
        assert assoc_residual(ctx, v) < 1e-4

    def test_transferred_pair_solves_vekua_equation(self, example_g, example_elements):
        """W = sqrt(p) u + i v / sqrt(p) with v from u solves the main Vekua equation."""
        grid = ProbeGrid.rectangle((-0.3, 0.3, 5), (-0.3, 0.3, 5))
        ctx = transfer_context(example_g, grid)
        u = example_elements[3]
        v = transfer_u_to_v(ctx, u)

        def W(x, y):
            root_p = np.sqrt(np.asarray(ctx.pair.p(x, y)))
            return root_p * np.asarray(u(x, y)) + 1j * np.asarray(v(x, y)) / root_p

        X, Y = grid.points
        scale = max(1.0, float(np.max(np.abs(W(X, Y)))))
        assert vekua_residual(W, ctx.f, grid) / scale < 1e-5

    def test_zero_transfers_to_multiple_of_u0(self, ctx):
        """v = 0 maps to -c u0, a pure kernel term."""
        shifted = replace(ctx, c=0.5)

        def zero(x, y):
            return np.zeros(np.broadcast(x, y).shape)

        u_back = transfer_v_to_u(shifted, zero)
        kappa, residual = fit_kernel_constant(shifted, zero, u_back)
        assert kappa == pytest.approx(-0.5, abs=1e-12)
        assert residual < 1e-12
