"""
Tests for adaptive quadrature and antiderivative tables.
"""

import numpy as np
import pytest

from planar_beltrami.errors import NonConvergence, NonFiniteSample, OutOfDomain
from planar_beltrami.quadrature import (
    Interval,
    cumulative,
    integrate,
    integrate_segments,
    table_deriv,
    table_eval,
)


class TestInterval:
    """Test Interval."""

    def test_create_interval(self):
        """Should expose width and midpoint."""
        interval = Interval(-1.0, 3.0)
        assert interval.width == 4.0
        assert interval.midpoint == 1.0
        assert interval.to_list() == [-1.0, 3.0]

    def test_of_coerces_pairs(self):
        """Should build an Interval from a list and pass Intervals through."""
        interval = Interval.of([0, 2])
        assert interval == Interval(0.0, 2.0)
        assert Interval.of(interval) is interval

    def test_rejects_empty_interval(self):
        """Should reject lo >= hi and non-finite bounds."""
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)
        with pytest.raises(ValueError):
            Interval(0.0, np.inf)

    def test_contains(self):
        """contains should check every value, with optional slack."""
        interval = Interval(0.0, 1.0)
        assert interval.contains(np.array([0.0, 0.5, 1.0]))
        assert not interval.contains(np.array([0.5, 1.1]))
        assert interval.contains(1.05, slack=0.1)

    def test_contains_interval(self):
        """Should detect nested intervals."""
        assert Interval(-1, 1).contains_interval(Interval(-0.5, 1))
        assert not Interval(-1, 1).contains_interval(Interval(-0.5, 1.5))


class TestIntegrate:
    """Test integrate and integrate_segments."""

    def test_sine(self):
        """Integral of sin over [0, pi] is 2."""
        assert integrate(np.sin, Interval(0.0, np.pi)) == pytest.approx(2.0, abs=1e-12)

    def test_exponential(self):
        """Integral of exp over [0, 1] is e - 1."""
        assert integrate(np.exp, Interval(0.0, 1.0)) == pytest.approx(np.e - 1.0, abs=1e-12)

    def test_peaked_integrand(self):
        """Should resolve a narrow peak by subdivision."""
        result = integrate(lambda t: 1.0 / (1e-4 + t**2), Interval(-1.0, 1.0))
        expected = 2.0 * np.arctan(1.0 / 1e-2) / 1e-2
        assert result == pytest.approx(expected, rel=1e-9)

    def test_power_of_one_minus_y_squared(self):
        """Integrals of (1 - y^2)^(3/2) and (1 - y^2)^(-3/2) over [0, 0.5]."""
        s = np.sqrt(0.75)
        expected = 0.5 * (5.0 - 2.0 * 0.25) * s / 8.0 + 3.0 / 8.0 * np.arcsin(0.5)
        result = integrate(lambda t: (1.0 - t**2) ** 1.5, Interval(0.0, 0.5))
        assert result == pytest.approx(expected, abs=1e-12)
        assert result == pytest.approx(0.4399192, abs=1e-7)

        result = integrate(lambda t: (1.0 - t**2) ** -1.5, Interval(0.0, 0.5))
        assert result == pytest.approx(0.5 / s, abs=1e-12)
        assert result == pytest.approx(0.5773503, abs=1e-7)

    def test_additivity(self):
        """Integrals over adjacent intervals add up."""
        def f(t):
            return np.exp(-t) * np.cos(3.0 * t)

        whole = integrate(f, Interval(0.0, 0.8))
        parts = integrate(f, Interval(0.0, 0.3)) + integrate(f, Interval(0.3, 0.8))
        assert parts == pytest.approx(whole, abs=1e-12)

    @pytest.mark.parametrize("degree", [0, 1, 2, 3, 4, 5])
    def test_polynomials_are_exact(self, degree):
        """Polynomials up to degree 5 integrate to rounding error."""
        coefficients = np.arange(1.0, degree + 2.0) * (-1.0) ** np.arange(degree + 1)
        poly = np.polynomial.Polynomial(coefficients)
        antiderivative = poly.integ()
        expected = antiderivative(1.3) - antiderivative(-0.7)
        assert integrate(poly, Interval(-0.7, 1.3)) == pytest.approx(expected, abs=1e-13)

    def test_non_finite_sample(self):
        """Should raise NonFiniteSample when the integrand returns NaN."""
        with pytest.raises(NonFiniteSample):
            integrate(lambda t: np.full(t.shape, np.nan), Interval(0.0, 1.0))

    def test_non_convergence(self):
        """A jump at a non-dyadic point never satisfies the panel test."""
        with pytest.raises(NonConvergence):
            integrate(lambda t: np.where(t < 1.0 / 3.0, 0.0, 1.0), Interval(0.0, 1.0))

    def test_rejects_nonpositive_tol(self):
        """Should reject tol <= 0."""
        with pytest.raises(ValueError):
            integrate(np.sin, Interval(0.0, 1.0), tol=0.0)

    def test_segments_with_orientation(self):
        """Reversed segments integrate with a negative sign; empty ones give 0."""
        result = integrate_segments(
            lambda t, k: np.cos(t), np.zeros(3), np.array([1.0, -1.0, 0.0])
        )
        np.testing.assert_allclose(result, [np.sin(1.0), -np.sin(1.0), 0.0], atol=1e-13)

    def test_segments_use_owner_index(self):
        """Each segment should see its own integrand."""
        scale = np.array([1.0, 2.0, 3.0])
        result = integrate_segments(
            lambda t, k: scale[k] * t, np.zeros(3), np.ones(3)
        )
        np.testing.assert_allclose(result, 0.5 * scale, atol=1e-14)


class TestCumulative:
    """Test antiderivative tables."""

    def test_cosine_antiderivative(self):
        """The table of cos from 0 reproduces sin between nodes."""
        table = cumulative(np.cos, 0.0, Interval(-1.0, 1.0))
        y = np.linspace(-0.99, 0.99, 157)
        np.testing.assert_allclose(table(y), np.sin(y), atol=1e-10)
        assert table.order == 3

    def test_quintic_with_derivative(self):
        """Supplying f_deriv switches to quintic interpolation."""
        table = cumulative(np.cos, 0.0, Interval(-1.0, 1.0), f_deriv=lambda t: -np.sin(t))
        y = np.linspace(-0.99, 0.99, 157)
        assert table.order == 5
        np.testing.assert_allclose(table(y), np.sin(y), atol=1e-12)
        np.testing.assert_allclose(table.deriv(y), np.cos(y), atol=1e-10)

    def test_linear_integrand(self):
        """The table of 2y from 0 is y^2, so 0.49 at y = 0.7."""
        table = cumulative(lambda t: 2.0 * t, 0.0, Interval(0.0, 1.0))
        assert table(0.7) == pytest.approx(0.49, abs=1e-13)

    def test_zero_at_base_point(self):
        """The table vanishes exactly at its base point, also off the uniform nodes."""
        table = cumulative(np.exp, 0.123, Interval(-1.0, 1.0))
        assert table(0.123) == 0.0
        assert table.base_point == 0.123
        assert table(1.0) == pytest.approx(np.exp(1.0) - np.exp(0.123), abs=1e-10)

    def test_derivative_matches_integrand_at_nodes(self):
        """table_deriv reproduces the integrand at every node."""
        table = cumulative(np.exp, 0.0, Interval(0.0, 2.0), n_nodes=65)
        np.testing.assert_allclose(table_deriv(table, table.nodes), np.exp(table.nodes), rtol=1e-12)
        np.testing.assert_allclose(table_eval(table, table.nodes), table.values, atol=1e-14)

    def test_scalar_input_returns_float(self):
        """Scalar queries return Python floats."""
        table = cumulative(np.cos, 0.0, Interval(-1.0, 1.0))
        assert isinstance(table(0.5), float)
        assert isinstance(table.deriv(0.5), float)

    def test_out_of_range_query(self):
        """Should raise OutOfDomain outside the table range."""
        table = cumulative(np.cos, 0.0, Interval(-1.0, 1.0))
        with pytest.raises(OutOfDomain):
            table(1.5)

    def test_base_point_outside_interval(self):
        """Should raise OutOfDomain for a base point outside the interval."""
        with pytest.raises(OutOfDomain):
            cumulative(np.cos, 2.0, Interval(-1.0, 1.0))

    def test_too_few_nodes(self):
        """Should reject tables with fewer than 32 nodes."""
        with pytest.raises(ValueError, match="n_nodes"):
            cumulative(np.cos, 0.0, Interval(-1.0, 1.0), n_nodes=8)
