"""
Tests comparing constructed solutions with closed forms.
"""

import numpy as np
import pytest

from planar_beltrami.beltrami import (
    BeltramiFieldElement,
    b3_basis,
    beltrami_residual,
    div_alpha_residual,
    field_from_scalar,
)
from planar_beltrami.closed_forms import (
    constant_alpha_elements,
    example_f0,
    example_field,
    example_formal_power,
    example_Y1,
    example_Y2,
    example_Y3,
    example_Ytilde1,
    example_Ytilde2,
    example_Ytilde3,
)
from planar_beltrami.errors import DomainError
from planar_beltrami.formal_powers import formal_power
from planar_beltrami.profile import schrodinger_potential
from planar_beltrami.vekua import ProbeGrid

Y = np.linspace(-0.9, 0.9, 31)
GRID = ProbeGrid.rectangle((-0.8, 0.8, 9), (-0.8, 0.8, 9))


class TestExampleFormalPowers:
    """Formal powers of f0 = (1 - y^2)^(3/4) around z0 = 0."""

    def test_levels(self, example_powers):
        """The recursion tables match the elementary closed forms."""
        table = example_powers.table
        for k, closed in enumerate((example_Y1, example_Y2, example_Y3), start=1):
            np.testing.assert_allclose(table.Y(k, Y), closed(Y), atol=1e-9)
        for k, closed in enumerate((example_Ytilde1, example_Ytilde2, example_Ytilde3), start=1):
            np.testing.assert_allclose(table.Ytilde(k, Y), closed(Y), atol=1e-9)

    def test_f0(self, example_g):
        """The generating function matches (1 - y^2)^(3/4)."""
        np.testing.assert_allclose(example_g.f0(Y), example_f0(Y), atol=1e-11)

    @pytest.mark.parametrize("n", range(4))
    @pytest.mark.parametrize("a", [1.0, 1j])
    def test_disk_points(self, example_powers, disk_points, n, a):
        """Z(n, a) agrees with the closed form at 200 points of the disk |z| <= 0.9."""
        x, y = disk_points
        np.testing.assert_allclose(
            formal_power(example_powers, a, n, x + 1j * y),
            example_formal_power(n, a, x, y),
            atol=1e-8,
        )

    def test_first_imaginary_power(self, example_powers, disk_points):
        """Z(1, i) = -y/sqrt(1 - y^2) + i x to 1e-10."""
        x, y = disk_points
        np.testing.assert_allclose(
            formal_power(example_powers, 1j, 1, x + 1j * y),
            example_formal_power(1, 1j, x, y),
            atol=1e-10,
        )

    def test_out_of_range(self):
        """Closed forms stop at n = 3 and index 6."""
        with pytest.raises(ValueError):
            example_formal_power(4, 1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            example_field(7, 0.0, 0.0)


class TestExampleFields:
    """The first seven basis fields in closed form."""

    @pytest.mark.parametrize("index", range(7))
    def test_matches_basis(self, example_alpha, example_elements, disk_points, index):
        """(B1, B2, B3) of the basis agree with the closed forms to 1e-8."""
        x, y = disk_points
        field = field_from_scalar(example_elements[index], example_alpha)
        for built, closed in zip(field.components(x, y), example_field(index, x, y)):
            np.testing.assert_allclose(built, closed, atol=1e-8)

    @pytest.mark.parametrize("index", range(7))
    def test_closed_forms_are_solutions(self, example_alpha, index):
        """The closed forms satisfy the Beltrami system and div(alpha B) = 0."""
        field = BeltramiFieldElement(
            f"closed[{index}]",
            B1=lambda x, y: example_field(index, x, y)[0],
            B2=lambda x, y: example_field(index, x, y)[1],
            B3=lambda x, y: example_field(index, x, y)[2],
        )
        assert beltrami_residual(field, example_alpha, GRID).worst < 1e-7
        assert div_alpha_residual(field, example_alpha, GRID) < 1e-8


class TestConstantAlpha:
    """alpha = 2, c1 = 1, c2 = 0, y_ref = 0 around z0 = 0.75i."""

    @pytest.fixture(scope="class")
    def closed(self):
        return constant_alpha_elements(2.0, 1.0, 0.0, 0.0, 0.75j)

    def test_phase_and_potential(self, constant_alpha, constant_g, closed):
        """A = 2y, f0 = sin(2y)/sqrt(2) and r = -4."""
        y = np.linspace(0.2, 1.3, 23)
        np.testing.assert_allclose(constant_g.A(y), closed.A(y), atol=1e-10)
        np.testing.assert_allclose(constant_g.f0(y), closed.f0(y), atol=1e-10)
        np.testing.assert_allclose(
            schrodinger_potential(constant_alpha)(y), closed.potential(y), atol=1e-10
        )
        assert closed.sign == 1.0 == constant_g.sign

    def test_first_elements(self, constant_alpha, constant_g, closed):
        """B3[0,u], B3[1,u] and B3[1,v] match the closed forms."""
        elements = b3_basis(constant_alpha, constant_g, 0.75j, 1)
        X, Yg = ProbeGrid.rectangle((-0.4, 0.4, 9), (0.35, 1.15, 9)).points
        by_name = {e.name: e for e in elements}
        for name, fn in closed.elements().items():
            np.testing.assert_allclose(by_name[name](X, Yg), fn(X, Yg), atol=1e-9)

    def test_general_phase(self):
        """c1 sin A + c2 cos A = R sin(theta) for any (c1, c2)."""
        mixed = constant_alpha_elements(1.5, 0.6, -0.8, 0.1, 0.2j)
        y = np.linspace(-0.5, 0.5, 11)
        A = mixed.A(y)
        np.testing.assert_allclose(
            mixed.amplitude(y), mixed.sign * (0.6 * np.sin(A) - 0.8 * np.cos(A)), atol=1e-14
        )
        assert mixed.radius == pytest.approx(1.0)

    def test_sign_follows_anchor(self):
        """The amplitude is positive at Im z0."""
        flipped = constant_alpha_elements(1.0, 0.0, -1.0, 0.0, 0j)
        assert flipped.sign == -1.0
        assert flipped.amplitude(0.0) == pytest.approx(1.0)

    def test_invalid(self):
        """k <= 0 and a vanishing amplitude at Im z0 are rejected."""
        with pytest.raises(DomainError):
            constant_alpha_elements(0.0, 1.0, 0.0, 0.0, 0j)
        with pytest.raises(DomainError):
            constant_alpha_elements(2.0, 1.0, 0.0, 0.0, 0j)
