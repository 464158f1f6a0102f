"""
Beltrami fields rot B + alpha B = 0 with alpha = alpha(y).

For fields independent of z the system reduces to one scalar equation for
the third component,

    div(alpha^-1 grad B3) + alpha B3 = 0,

with B1 = -(1/alpha) dB3/dy and B2 = (1/alpha) dB3/dx. Its complete system
of solutions is sqrt(alpha) f0 Re Z(n, a) for a in {1, i}; the element with
n = 0, a = i vanishes identically and is left out, so the basis of order
n_max has 2 n_max + 1 elements named B3[0,u], B3[1,u], B3[1,v], ...
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NOrderExceeded, OutOfDomain
from .formal_powers import FormalPowerBasis, formal_basis
from .profile import AlphaProfile, ConductivityPair, GeneratingFunction, schrodinger_potential
from .quadrature import DEFAULT_NODES, DEFAULT_TOL
from .vekua import (
    DEFAULT_FD_STEP,
    ComplexField,
    ProbeGrid,
    TransferContext,
    divergence_form,
    partial_x,
    partial_y,
)

logger = logging.getLogger(__name__)

ScalarField = Callable[[Any, Any], Any]
GradientFn = Callable[[Any, Any], tuple[Any, Any]]


class Flavor(str, Enum):
    """Which coefficient generates the element: a = 1 (u) or a = i (v)."""

    UNIT = "u"
    IMAG = "v"

    @property
    def coefficient(self) -> complex:
        return 1.0 + 0j if self is Flavor.UNIT else 1j


def element_name(n: int, flavor: Flavor) -> str:
    return f"B3[{n},{flavor.value}]"


def element_index(n: int, flavor: Flavor) -> int:
    """Position in the basis ordering B3[0,u], B3[1,u], B3[1,v], B3[2,u], ..."""
    if n == 0:
        return 0
    return 2 * n - 1 if flavor is Flavor.UNIT else 2 * n


def element_key(index: int) -> tuple[int, Flavor]:
    """Inverse of element_index."""
    if index < 0:
        raise ValueError(f"Basis index must be nonnegative, got {index}")
    if index == 0:
        return 0, Flavor.UNIT
    return (index + 1) // 2, Flavor.UNIT if index % 2 else Flavor.IMAG


def _real(values: Any, like: Any) -> Any:
    return values if np.ndim(like) else float(values)


# =============================================================================
# Basis elements
# =============================================================================


@dataclass(frozen=True, eq=False)
class ScalarBasisElement:
    """B3 = sqrt(alpha) f0 Re Z(n, a), with its analytic gradient."""

    n: int
    flavor: Flavor
    powers: FormalPowerBasis = field(repr=False)
    g: GeneratingFunction = field(repr=False)

    @property
    def name(self) -> str:
        return element_name(self.n, self.flavor)

    @property
    def index(self) -> int:
        return element_index(self.n, self.flavor)

    @property
    def a(self) -> complex:
        return self.flavor.coefficient

    def __call__(self, x: Any, y: Any) -> Any:
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        values = np.asarray(self.g.amplitude(y_arr)) * self.powers.evaluate(
            self.a, self.n, x_arr, y_arr
        ).real
        return _real(values, x_arr)

    def grad(self, x: Any, y: Any) -> tuple[Any, Any]:
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        m = np.asarray(self.g.amplitude(y_arr))
        dm = np.asarray(self.g.amplitude_deriv(y_arr))
        value = self.powers.evaluate(self.a, self.n, x_arr, y_arr).real
        zx, zy = self.powers.gradient(self.a, self.n, x_arr, y_arr)
        return _real(m * zx.real, x_arr), _real(dm * value + m * zy.real, x_arr)

    def second_kind_field(self) -> ComplexField:
        """omega = Z(n, a) with its analytic partials."""
        return ComplexField(
            lambda x, y: self.powers.evaluate(self.a, self.n, x, y),
            grad=lambda x, y: self.powers.gradient(self.a, self.n, x, y),
        )

    def first_kind_field(self) -> ComplexField:
        """W = f0 Re Z + i Im Z / f0."""

        def W(x: Any, y: Any) -> Any:
            omega = self.powers.evaluate(self.a, self.n, x, y)
            f0 = np.asarray(self.g.f0(np.broadcast_to(y, np.shape(omega))))
            return f0 * omega.real + 1j * omega.imag / f0

        return ComplexField(W)


def scalar_elements(powers: FormalPowerBasis, g: GeneratingFunction) -> list[ScalarBasisElement]:
    """All elements up to powers.n_max in basis order."""
    elements = [ScalarBasisElement(0, Flavor.UNIT, powers, g)]
    for n in range(1, powers.n_max + 1):
        elements.append(ScalarBasisElement(n, Flavor.UNIT, powers, g))
        elements.append(ScalarBasisElement(n, Flavor.IMAG, powers, g))
    return elements


def b3_basis(
    profile: AlphaProfile,
    g: GeneratingFunction,
    z0: complex,
    n_max: int,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
) -> list[ScalarBasisElement]:
    """
    Build the 2 n_max + 1 scalar solutions centred at z0.

    Raises:
        OutOfDomain: If Im z0 is outside the positivity window of g
        NonConvergence, NonFiniteSample: From the recursion tables
    """
    if g.alpha is not profile:
        raise ValueError("Generating function was built from a different alpha profile")
    z0 = complex(z0)
    if not g.positivity.contains(z0.imag):
        raise OutOfDomain(
            f"Im z0={z0.imag!r} is outside the positivity window "
            f"[{g.positivity.lo}, {g.positivity.hi}]"
        )
    powers = formal_basis(g, z0, n_max, tol, n_nodes)
    elements = scalar_elements(powers, g)
    logger.info("Built %d basis elements up to n=%d at z0=%s", len(elements), n_max, z0)
    return elements


# =============================================================================
# Vector fields
# =============================================================================


@dataclass(frozen=True, eq=False)
class BeltramiFieldElement:
    """
    Vector field (B1, B2, B3). b3_grad, when present, is the analytic
    gradient of B3 and is used by the first two residuals.
    """

    name: str
    B1: ScalarField
    B2: ScalarField
    B3: ScalarField
    b3_grad: Optional[GradientFn] = None
    source: Optional[ScalarBasisElement] = None

    def components(self, x: Any, y: Any) -> tuple[Any, Any, Any]:
        return self.B1(x, y), self.B2(x, y), self.B3(x, y)

    def scaled(self, c: float) -> "BeltramiFieldElement":
        grad = self.b3_grad
        return BeltramiFieldElement(
            name=f"{c:g}*{self.name}",
            B1=lambda x, y: c * np.asarray(self.B1(x, y)),
            B2=lambda x, y: c * np.asarray(self.B2(x, y)),
            B3=lambda x, y: c * np.asarray(self.B3(x, y)),
            b3_grad=None
            if grad is None
            else lambda x, y: tuple(c * np.asarray(d) for d in grad(x, y)),
            source=self.source,
        )


def field_from_gradient(
    name: str,
    b3: ScalarField,
    b3_grad: GradientFn,
    profile: AlphaProfile,
    source: Optional[ScalarBasisElement] = None,
) -> BeltramiFieldElement:
    """B1 = -(1/alpha) dB3/dy, B2 = (1/alpha) dB3/dx."""

    def B1(x: Any, y: Any) -> Any:
        return -np.asarray(b3_grad(x, y)[1]) / np.asarray(profile(y))

    def B2(x: Any, y: Any) -> Any:
        return np.asarray(b3_grad(x, y)[0]) / np.asarray(profile(y))

    return BeltramiFieldElement(name, B1, B2, b3, b3_grad, source)


def field_from_scalar(e: ScalarBasisElement, profile: AlphaProfile) -> BeltramiFieldElement:
    return field_from_gradient(e.name, e, e.grad, profile, e)


class BeltramiResiduals(NamedTuple):
    """Sup-norms of dB3/dy + alpha B1, -dB3/dx + alpha B2, dB2/dx - dB1/dy + alpha B3."""

    first: float
    second: float
    third: float

    @property
    def worst(self) -> float:
        return max(self)


def beltrami_residual(
    field: Any, profile: AlphaProfile, grid: ProbeGrid, h: float = DEFAULT_FD_STEP
) -> BeltramiResiduals:
    """
    The three scalar Beltrami residuals on the grid. Accepts a
    BeltramiFieldElement or a SeriesSolution.
    """
    if isinstance(field, SeriesSolution):
        field = field.as_field()
    X, Y = grid.points
    alpha = np.asarray(profile(Y))
    if field.b3_grad is not None:
        b3x, b3y = (np.asarray(d) for d in field.b3_grad(X, Y))
    else:
        b3x, b3y = partial_x(field.B3, X, Y, h), partial_y(field.B3, X, Y, h)
    B1, B2, B3 = (np.asarray(c) for c in field.components(X, Y))
    first = b3y + alpha * B1
    second = -b3x + alpha * B2
    third = partial_x(field.B2, X, Y, h) - partial_y(field.B1, X, Y, h) + alpha * B3
    return BeltramiResiduals(*(float(np.max(np.abs(r))) for r in (first, second, third)))


def div_alpha_residual(
    field: Any, profile: AlphaProfile, grid: ProbeGrid, h: float = DEFAULT_FD_STEP
) -> float:
    """sup |d(alpha B1)/dx + d(alpha B2)/dy| on the grid."""
    if isinstance(field, SeriesSolution):
        field = field.as_field()
    X, Y = grid.points

    def flux_x(x: Any, y: Any) -> Any:
        return np.asarray(profile(y)) * np.asarray(field.B1(x, y))

    def flux_y(x: Any, y: Any) -> Any:
        return np.asarray(profile(y)) * np.asarray(field.B2(x, y))

    values = partial_x(flux_x, X, Y, h) + partial_y(flux_y, X, Y, h)
    return float(np.max(np.abs(values)))


def field_scale(field: Any, profile: AlphaProfile, grid: ProbeGrid) -> float:
    """sup |alpha B3| on the grid, the scale of the third residual."""
    if isinstance(field, SeriesSolution):
        field = field.as_field()
    X, Y = grid.points
    return float(np.max(np.abs(np.asarray(profile(Y)) * np.asarray(field.B3(X, Y)))))


def b3_equation_residual(
    field: Any,
    profile: AlphaProfile,
    grid: ProbeGrid,
    form: str = "divergence",
    h: float = DEFAULT_FD_STEP,
) -> float:
    """
    Residual of the scalar equation for B3 in one of two equivalent forms:

    - "divergence": div(alpha^-1 grad B3) + alpha B3
    - "expanded":   lap B3 - <grad alpha / alpha, grad B3> + alpha^2 B3
    """
    if isinstance(field, SeriesSolution):
        field = field.as_field()
    if form not in ("divergence", "expanded"):
        raise ValueError(f"Unknown form {form!r}; use 'divergence' or 'expanded'")
    X, Y = grid.points
    alpha = np.asarray(profile(Y))
    B3 = np.asarray(field.B3(X, Y))
    grad = field.b3_grad
    if form == "divergence":
        inverse = lambda x, y: 1.0 / np.asarray(profile(y))  # noqa: E731
        values = divergence_form(inverse, field.B3, X, Y, h, h, grad) + alpha * B3
    else:
        unit = lambda x, y: np.ones(np.shape(x))  # noqa: E731
        laplacian = divergence_form(unit, field.B3, X, Y, h, h, grad)
        b3y = np.asarray(grad(X, Y)[1]) if grad is not None else partial_y(field.B3, X, Y, h)
        values = laplacian - np.asarray(profile.deriv(Y)) / alpha * b3y + alpha**2 * B3
    return float(np.max(np.abs(values)))


def schrodinger_residual(
    field: Any, profile: AlphaProfile, grid: ProbeGrid, h: float = DEFAULT_FD_STEP
) -> float:
    """sup |-lap(B3/sqrt(alpha)) + r B3/sqrt(alpha)| on the grid."""
    if isinstance(field, ScalarBasisElement):
        field = field_from_scalar(field, profile)
    elif isinstance(field, SeriesSolution):
        field = field.as_field()
    potential = schrodinger_potential(profile)

    def reduced(x: Any, y: Any) -> Any:
        return np.asarray(field.B3(x, y)) / np.sqrt(np.asarray(profile(y)))

    reduced_grad = None
    if field.b3_grad is not None:

        def reduced_grad(x: Any, y: Any) -> tuple[Any, Any]:
            bx, by = field.b3_grad(x, y)
            root = np.sqrt(np.asarray(profile(y)))
            correction = 0.5 * np.asarray(profile.deriv(y)) / (root * np.asarray(profile(y)))
            return (
                np.asarray(bx) / root,
                np.asarray(by) / root - correction * np.asarray(field.B3(x, y)),
            )

    X, Y = grid.points
    unit = lambda x, y: np.ones(np.shape(x))  # noqa: E731
    laplacian = divergence_form(unit, reduced, X, Y, h, h, reduced_grad)
    values = -laplacian + np.asarray(potential(Y)) * np.asarray(reduced(X, Y))
    return float(np.max(np.abs(values)))


# =============================================================================
# Series solutions
# =============================================================================


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """
    B3 = sum_k c_k e_k over basis elements in basis order.

    The coefficient vector is flat: c_0 multiplies B3[0,u], c_{2n-1} the
    element B3[n,u] (a_n) and c_{2n} the element B3[n,v] (b_n).
    """

    coefficients: np.ndarray
    elements: Sequence[ScalarBasisElement] = field(repr=False)
    profile: AlphaProfile = field(repr=False)

    def __post_init__(self) -> None:
        coefficients = np.asarray(self.coefficients, dtype=float).ravel()
        if coefficients.size > len(self.elements):
            raise NOrderExceeded(
                f"{coefficients.size} coefficients but only {len(self.elements)} basis elements"
            )
        if coefficients.size % 2 == 0:
            raise DimensionMismatch(
                f"Coefficient vectors have odd length 2*n+1, got {coefficients.size}"
            )
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_pairs(
        cls,
        pairs: Sequence[tuple[float, float]],
        elements: Sequence[ScalarBasisElement],
        profile: AlphaProfile,
    ) -> "SeriesSolution":
        """Coefficients given as (a_n, b_n) per order; b_0 is ignored."""
        if not pairs:
            raise DimensionMismatch("At least the n=0 coefficient is required")
        flat = [float(pairs[0][0])]
        for a_n, b_n in pairs[1:]:
            flat.extend([float(a_n), float(b_n)])
        return cls(np.array(flat), elements, profile)

    @property
    def n_max(self) -> int:
        return (self.coefficients.size - 1) // 2

    def pairs(self) -> list[tuple[float, float]]:
        c = self.coefficients
        return [(float(c[0]), 0.0)] + [
            (float(c[2 * n - 1]), float(c[2 * n])) for n in range(1, self.n_max + 1)
        ]

    def b3(self, x: Any, y: Any) -> Any:
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        total = np.zeros(x_arr.shape)
        for c, element in zip(self.coefficients, self.elements):
            total = total + c * np.asarray(element(x_arr, y_arr))
        return _real(total, x_arr)

    def b3_grad(self, x: Any, y: Any) -> tuple[Any, Any]:
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        gx, gy = np.zeros(x_arr.shape), np.zeros(x_arr.shape)
        for c, element in zip(self.coefficients, self.elements):
            ex, ey = element.grad(x_arr, y_arr)
            gx = gx + c * np.asarray(ex)
            gy = gy + c * np.asarray(ey)
        return _real(gx, x_arr), _real(gy, x_arr)

    def as_field(self) -> BeltramiFieldElement:
        return field_from_gradient("series", self.b3, self.b3_grad, self.profile)


def series_eval(s: SeriesSolution, z: Any) -> Any:
    """B3 of the series at z."""
    z = np.asarray(z, dtype=complex)
    return s.b3(z.real, z.imag)


def series_field(s: SeriesSolution, z: Any) -> tuple[Any, Any, Any]:
    """(B1, B2, B3) of the series at z."""
    z = np.asarray(z, dtype=complex)
    return s.as_field().components(z.real, z.imag)


# =============================================================================
# Transfer context and sampling
# =============================================================================


def transfer_context(
    g: GeneratingFunction,
    grid: ProbeGrid,
    base: Optional[tuple[float, float]] = None,
    **options: Any,
) -> TransferContext:
    """
    The (p, q) = (1/alpha, alpha) context with u0 = sqrt(alpha) f0, so that
    f = sqrt(p) u0 = f0.
    """
    if base is None:
        base = (float(grid.x_range.midpoint), float(grid.y_range.midpoint))

    def u0(x: Any, y: Any) -> Any:
        return np.broadcast_to(np.asarray(g.amplitude(y)), np.broadcast(x, y).shape)

    def u0_grad(x: Any, y: Any) -> tuple[Any, Any]:
        shape = np.broadcast(x, y).shape
        return np.zeros(shape), np.broadcast_to(np.asarray(g.amplitude_deriv(y)), shape)

    return TransferContext(
        pair=ConductivityPair.beltrami(g.alpha),
        u0=u0,
        u0_grad=u0_grad,
        grid=grid,
        base=base,
        **options,
    )


def sample_field(field: Any, grid: ProbeGrid) -> dict[str, np.ndarray]:
    """Flattened columns x, y, B1, B2, B3 on the grid (row-major in y)."""
    if isinstance(field, SeriesSolution):
        field = field.as_field()
    X, Y = grid.points
    B1, B2, B3 = (np.asarray(c, dtype=float) for c in field.components(X, Y))
    return {
        "x": X.ravel(),
        "y": Y.ravel(),
        "B1": B1.ravel(),
        "B2": B2.ravel(),
        "B3": B3.ravel(),
    }
