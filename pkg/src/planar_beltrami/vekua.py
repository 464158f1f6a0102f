"""
Vekua-equation machinery for (div p grad + q) u = 0.

This module provides:
- ProbeGrid and fixed-step fourth-order finite differences, batched so every
  stencil is evaluated in a single call of the field
- ComplexField: a complex field with optional analytic partials
- abar: the real antiderivative phi of Phi = phi_zbar on a rectangle,
  phi = 2 (int_x0^x Phi1(t, y) dt + int_y0^y Phi2(x0, t) dt) + c
- TransferContext, compute_q1 and the u <-> v transfer formulas
- residual operators for the main Vekua equation, the second-kind equation
  and both second-order equations of the split W -> (u, v)
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from .errors import CompatibilityError, OutOfDomain, ResidualError
from .profile import ConductivityPair
from .quadrature import DEFAULT_TOL, Interval, integrate_segments

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-3
DEFAULT_NESTED_STEP = 5e-3
DEFAULT_COMPAT_TOL = 1e-6
DEFAULT_SOLUTION_TOL = 1e-5

ScalarField = Callable[[np.ndarray, np.ndarray], Any]
GradientFn = Callable[[np.ndarray, np.ndarray], tuple[Any, Any]]

# Central stencil for f'(t) at offsets -2h, -h, +h, +2h
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


# =============================================================================
# Probe grids and finite differences
# =============================================================================


@dataclass(frozen=True, eq=False)
class ProbeGrid:
    """Tensor grid of probe points; x and y are 1-D coordinate arrays."""

    x: np.ndarray
    y: np.ndarray

    @classmethod
    def rectangle(
        cls, x_spec: Sequence[float], y_spec: Sequence[float]
    ) -> "ProbeGrid":
        """Grid from (lo, hi, count) triples."""
        axes = []
        for label, spec in (("x", x_spec), ("y", y_spec)):
            lo, hi, count = spec
            if int(count) < 2:
                raise ValueError(f"Grid {label} count must be at least 2, got {count}")
            Interval(lo, hi)
            axes.append(np.linspace(float(lo), float(hi), int(count)))
        return cls(axes[0], axes[1])

    @classmethod
    def from_config(cls, spec: dict[str, Sequence[float]]) -> "ProbeGrid":
        return cls.rectangle(spec["x"], spec["y"])

    @property
    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid arrays of shape (len(y), len(x))."""
        X, Y = np.meshgrid(self.x, self.y)
        return X, Y

    @property
    def shape(self) -> tuple[int, int]:
        return (self.y.size, self.x.size)

    @property
    def x_range(self) -> Interval:
        return Interval(self.x[0], self.x[-1])

    @property
    def y_range(self) -> Interval:
        return Interval(self.y[0], self.y[-1])

    def to_dict(self) -> dict[str, list[float]]:
        return {
            "x": [float(self.x[0]), float(self.x[-1]), int(self.x.size)],
            "y": [float(self.y[0]), float(self.y[-1]), int(self.y.size)],
        }


def partials(fn: ScalarField, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> tuple[Any, Any]:
    """(f_x, f_y) by fourth-order central differences with step h."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shift = _OFFSETS.reshape((4,) + (1,) * x.ndim) * h
    xs = np.concatenate([x[None] + shift, np.broadcast_to(x, (4,) + x.shape)])
    ys = np.concatenate([np.broadcast_to(y, (4,) + y.shape), y[None] + shift])
    values = np.asarray(fn(xs, ys))
    if values.shape != xs.shape:
        values = np.broadcast_to(values, xs.shape)
    fx = np.tensordot(_WEIGHTS, values[:4], axes=(0, 0)) / h
    fy = np.tensordot(_WEIGHTS, values[4:], axes=(0, 0)) / h
    return fx, fy


def _axis_derivative(fn: ScalarField, x: Any, y: Any, h: float, axis: int) -> Any:
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shift = _OFFSETS.reshape((4,) + (1,) * x.ndim) * h
    if axis == 0:
        xs, ys = x[None] + shift, np.broadcast_to(y, (4,) + y.shape)
    else:
        xs, ys = np.broadcast_to(x, (4,) + x.shape), y[None] + shift
    values = np.asarray(fn(xs, ys))
    if values.shape != xs.shape:
        values = np.broadcast_to(values, xs.shape)
    return np.tensordot(_WEIGHTS, values, axes=(0, 0)) / h


def partial_x(fn: ScalarField, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> Any:
    return _axis_derivative(fn, x, y, h, 0)


def partial_y(fn: ScalarField, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> Any:
    return _axis_derivative(fn, x, y, h, 1)


def dbar(fn: ScalarField, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> Any:
    """d/dzbar = (d/dx + i d/dy) / 2."""
    fx, fy = partials(fn, x, y, h)
    return 0.5 * (fx + 1j * fy)


def divergence_form(
    p: ScalarField,
    u: ScalarField,
    x: Any,
    y: Any,
    h: float = DEFAULT_FD_STEP,
    h_outer: float = DEFAULT_NESTED_STEP,
    u_grad: Optional[GradientFn] = None,
) -> Any:
    """div(p grad u); the inner gradient is analytic when u_grad is given."""

    def flux_x(xx: np.ndarray, yy: np.ndarray) -> Any:
        ux = u_grad(xx, yy)[0] if u_grad is not None else partial_x(u, xx, yy, h)
        return np.asarray(p(xx, yy)) * np.asarray(ux)

    def flux_y(xx: np.ndarray, yy: np.ndarray) -> Any:
        uy = u_grad(xx, yy)[1] if u_grad is not None else partial_y(u, xx, yy, h)
        return np.asarray(p(xx, yy)) * np.asarray(uy)

    return partial_x(flux_x, x, y, h_outer) + partial_y(flux_y, x, y, h_outer)


# =============================================================================
# Complex fields
# =============================================================================


@dataclass(frozen=True)
class ComplexField:
    """Complex-valued field (x, y) -> W with optional analytic (W_x, W_y)."""

    fn: Callable[[np.ndarray, np.ndarray], Any]
    grad: Optional[GradientFn] = None

    def __call__(self, x: Any, y: Any) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        values = np.asarray(self.fn(x, y), dtype=complex)
        return np.broadcast_to(values, x.shape) if values.shape != x.shape else values

    @classmethod
    def from_parts(cls, real: ScalarField, imag: ScalarField) -> "ComplexField":
        return cls(lambda x, y: np.asarray(real(x, y)) + 1j * np.asarray(imag(x, y)))

    def partials(self, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> tuple[Any, Any]:
        if self.grad is not None:
            gx, gy = self.grad(x, y)
            return np.asarray(gx, dtype=complex), np.asarray(gy, dtype=complex)
        return partials(self, x, y, h)

    def dbar(self, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> Any:
        fx, fy = self.partials(x, y, h)
        return 0.5 * (fx + 1j * fy)

    def dz(self, x: Any, y: Any, h: float = DEFAULT_FD_STEP) -> Any:
        fx, fy = self.partials(x, y, h)
        return 0.5 * (fx - 1j * fy)

    def sample(self, grid: ProbeGrid) -> np.ndarray:
        values = self(*grid.points)
        if not np.all(np.isfinite(values)):
            raise ValueError("Complex field is not finite on its probe grid")
        return values


def _as_field(phi: Union[ComplexField, Callable]) -> ComplexField:
    return phi if isinstance(phi, ComplexField) else ComplexField(phi)


def casirot_residual(
    phi: Union[ComplexField, Callable], grid: ProbeGrid, h: float = DEFAULT_FD_STEP
) -> float:
    """sup |d/dy Re Phi - d/dx Im Phi| over the grid."""
    phi = _as_field(phi)
    X, Y = grid.points
    px, py = phi.partials(X, Y, h)
    return float(np.max(np.abs(np.real(py) - np.imag(px))))


# =============================================================================
# Antiderivative operator
# =============================================================================


def abar(
    phi: Union[ComplexField, Callable],
    base: tuple[float, float],
    c: float = 0.0,
    grid: Optional[ProbeGrid] = None,
    tol: float = DEFAULT_TOL,
    compat_tol: float = DEFAULT_COMPAT_TOL,
    h: float = DEFAULT_FD_STEP,
) -> ScalarField:
    """
    Real antiderivative of Phi: a scalar field whose zbar-derivative is Phi.

    When grid is given, the compatibility condition d/dy Phi1 = d/dx Phi2 is
    checked on it first, relative to max(1, sup |Phi|).

    Raises:
        CompatibilityError: If the compatibility residual exceeds compat_tol
        OutOfDomain: If base lies outside the grid rectangle
    """
    phi = _as_field(phi)
    x0, y0 = float(base[0]), float(base[1])
    if grid is not None:
        if not (grid.x_range.contains(x0) and grid.y_range.contains(y0)):
            raise OutOfDomain(f"Base point ({x0}, {y0}) is outside the grid rectangle")
        scale = max(1.0, float(np.max(np.abs(phi.sample(grid)))))
        residual = casirot_residual(phi, grid, h) / scale
        if residual > compat_tol:
            raise CompatibilityError(residual, compat_tol)
        logger.debug("Compatibility residual %.3e on %s grid", residual, grid.shape)

    def field(x: Any, y: Any) -> Any:
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        xf, yf = xb.ravel(), yb.ravel()

        def along_x(t: np.ndarray, k: np.ndarray) -> np.ndarray:
            return np.real(phi(t, yf[k]))

        def along_y(t: np.ndarray, k: np.ndarray) -> np.ndarray:
            return np.imag(phi(np.full(t.shape, x0), t))

        first = integrate_segments(along_x, np.full(xf.shape, x0), xf, tol)
        second = integrate_segments(along_y, np.full(yf.shape, y0), yf, tol)
        out = (2.0 * (first + second) + c).reshape(xb.shape)
        return out if xb.ndim else float(out)

    return field


# =============================================================================
# Transfer formulas
# =============================================================================


@dataclass(frozen=True)
class TransferContext:
    """
    A conductivity pair with a known positive particular solution u0.

    f = sqrt(p) u0 is the Vekua generator. Transfers integrate over the
    rectangle spanned by grid, starting at base, with free constant c.
    """

    pair: ConductivityPair
    u0: ScalarField
    grid: ProbeGrid
    base: tuple[float, float] = (0.0, 0.0)
    c: float = 0.0
    u0_grad: Optional[GradientFn] = None
    h: float = DEFAULT_FD_STEP
    h_nested: float = DEFAULT_NESTED_STEP
    tol: float = DEFAULT_TOL
    compat_tol: float = DEFAULT_COMPAT_TOL
    solution_tol: float = DEFAULT_SOLUTION_TOL

    def f(self, x: Any, y: Any) -> Any:
        return np.sqrt(np.asarray(self.pair.p(x, y))) * np.asarray(self.u0(x, y))

    def p_gradient(self, x: Any, y: Any) -> tuple[Any, Any]:
        if self.pair.p_grad is not None:
            return self.pair.p_grad(x, y)
        return partials(self.pair.p, x, y, self.h)

    def u0_gradient(self, x: Any, y: Any) -> tuple[Any, Any]:
        if self.u0_grad is not None:
            return self.u0_grad(x, y)
        return partials(self.u0, x, y, self.h)


def compute_q1(ctx: TransferContext) -> ScalarField:
    """q1 = -(1/p) (q/p + 2 <grad p / p, grad u0 / u0> + 2 |grad u0 / u0|^2)."""

    def q1(x: Any, y: Any) -> Any:
        p = np.asarray(ctx.pair.p(x, y))
        q = np.asarray(ctx.pair.q(x, y))
        u0 = np.asarray(ctx.u0(x, y))
        px, py = ctx.p_gradient(x, y)
        ux, uy = ctx.u0_gradient(x, y)
        lx, ly = np.asarray(ux) / u0, np.asarray(uy) / u0
        cross = (np.asarray(px) * lx + np.asarray(py) * ly) / p
        return -(q / p + 2.0 * cross + 2.0 * (lx**2 + ly**2)) / p

    return q1


def maineq_residual(
    pair: ConductivityPair,
    u: ScalarField,
    grid: ProbeGrid,
    h: float = DEFAULT_FD_STEP,
    h_nested: float = DEFAULT_NESTED_STEP,
    u_grad: Optional[GradientFn] = None,
) -> float:
    """sup |div(p grad u) + q u| on the grid."""
    X, Y = grid.points
    values = divergence_form(pair.p, u, X, Y, h, h_nested, u_grad) + np.asarray(
        pair.q(X, Y)
    ) * np.asarray(u(X, Y))
    return float(np.max(np.abs(values)))


def assoc_residual(
    ctx: TransferContext,
    v: ScalarField,
    grid: Optional[ProbeGrid] = None,
    v_grad: Optional[GradientFn] = None,
) -> float:
    """sup |div(p^-1 grad v) + q1 v| on the grid."""
    grid = grid if grid is not None else ctx.grid
    X, Y = grid.points
    inverse_p = lambda x, y: 1.0 / np.asarray(ctx.pair.p(x, y))  # noqa: E731
    values = divergence_form(inverse_p, v, X, Y, ctx.h, ctx.h_nested, v_grad) + np.asarray(
        compute_q1(ctx)(X, Y)
    ) * np.asarray(v(X, Y))
    return float(np.max(np.abs(values)))


def _require_solution(residual: float, values: np.ndarray, tol: float, label: str) -> None:
    scale = max(1.0, float(np.max(np.abs(values))))
    if residual > tol * scale:
        raise ResidualError(f"{label} does not solve its equation on the probe grid", residual)


def transfer_u_to_v(ctx: TransferContext, u: ScalarField) -> ScalarField:
    """
    v = u0^-1 abar(i p u0^2 d/dzbar(u / u0)); W = sqrt(p) u + i v / sqrt(p)
    then solves the main Vekua equation.

    Raises:
        ResidualError: If u fails (div p grad + q) u = 0 on ctx.grid
        CompatibilityError: From abar
    """
    residual = maineq_residual(ctx.pair, u, ctx.grid, ctx.h, ctx.h_nested)
    _require_solution(residual, np.asarray(u(*ctx.grid.points)), ctx.solution_tol, "u")

    def ratio(x: Any, y: Any) -> Any:
        return np.asarray(u(x, y)) / np.asarray(ctx.u0(x, y))

    def source(x: Any, y: Any) -> Any:
        gx, gy = partials(ratio, x, y, ctx.h)
        weight = 0.5 * np.asarray(ctx.pair.p(x, y)) * np.asarray(ctx.u0(x, y)) ** 2
        return weight * (-gy + 1j * gx)

    phi = abar(source, ctx.base, ctx.c, ctx.grid, ctx.tol, ctx.compat_tol, ctx.h)

    def v(x: Any, y: Any) -> Any:
        return np.asarray(phi(x, y)) / np.asarray(ctx.u0(x, y))

    return v


def transfer_v_to_u(ctx: TransferContext, v: ScalarField) -> ScalarField:
    """
    u = -u0 abar(i p^-1 u0^-2 d/dzbar(u0 v)).

    Raises:
        ResidualError: If v fails (div p^-1 grad + q1) v = 0 on ctx.grid
        CompatibilityError: From abar
    """
    residual = assoc_residual(ctx, v)
    _require_solution(residual, np.asarray(v(*ctx.grid.points)), ctx.solution_tol, "v")

    def product(x: Any, y: Any) -> Any:
        return np.asarray(ctx.u0(x, y)) * np.asarray(v(x, y))

    def source(x: Any, y: Any) -> Any:
        gx, gy = partials(product, x, y, ctx.h)
        weight = 0.5 / (np.asarray(ctx.pair.p(x, y)) * np.asarray(ctx.u0(x, y)) ** 2)
        return weight * (-gy + 1j * gx)

    phi = abar(source, ctx.base, ctx.c, ctx.grid, ctx.tol, ctx.compat_tol, ctx.h)

    def u(x: Any, y: Any) -> Any:
        return -np.asarray(ctx.u0(x, y)) * np.asarray(phi(x, y))

    return u


def fit_kernel_constant(
    ctx: TransferContext, u: ScalarField, u_back: ScalarField, grid: Optional[ProbeGrid] = None
) -> tuple[float, float]:
    """
    Least-squares kappa with u_back ~ u + kappa u0.

    Returns:
        (kappa, sup |u_back - u - kappa u0| on the grid)
    """
    grid = grid if grid is not None else ctx.grid
    X, Y = grid.points
    u0 = np.asarray(ctx.u0(X, Y))
    defect = np.asarray(u_back(X, Y)) - np.asarray(u(X, Y))
    kappa = float(np.sum(defect * u0) / np.sum(u0 * u0))
    return kappa, float(np.max(np.abs(defect - kappa * u0)))


def roundtrip_defect(
    ctx: TransferContext, u: ScalarField, grid: Optional[ProbeGrid] = None
) -> tuple[float, float]:
    """Run u -> v -> u and fit the kernel constant; see fit_kernel_constant."""
    v = transfer_u_to_v(ctx, u)
    u_back = transfer_v_to_u(ctx, v)
    kappa, residual = fit_kernel_constant(ctx, u, u_back, grid)
    logger.debug("Roundtrip kernel constant %.6g, post-fit residual %.3e", kappa, residual)
    return kappa, residual


def split_solution(ctx: TransferContext, W: Union[ComplexField, Callable]) -> tuple[ScalarField, ScalarField]:
    """(u, v) = (p^-1/2 Re W, p^1/2 Im W)."""
    W = _as_field(W)

    def u(x: Any, y: Any) -> Any:
        return np.real(W(x, y)) / np.sqrt(np.asarray(ctx.pair.p(x, y)))

    def v(x: Any, y: Any) -> Any:
        return np.imag(W(x, y)) * np.sqrt(np.asarray(ctx.pair.p(x, y)))

    return u, v


# =============================================================================
# Vekua residuals
# =============================================================================


def vekua_residual(
    W: Union[ComplexField, Callable],
    f: ScalarField,
    grid: ProbeGrid,
    h: float = DEFAULT_FD_STEP,
    f_grad: Optional[GradientFn] = None,
) -> float:
    """sup |W_zbar - (f_zbar / f) conj(W)| on the grid."""
    W = _as_field(W)
    X, Y = grid.points
    fx, fy = f_grad(X, Y) if f_grad is not None else partials(f, X, Y, h)
    coefficient = 0.5 * (np.asarray(fx) + 1j * np.asarray(fy)) / np.asarray(f(X, Y))
    values = W.dbar(X, Y, h) - coefficient * np.conj(W(X, Y))
    return float(np.max(np.abs(values)))


def second_kind_residual(
    omega: Union[ComplexField, Callable],
    g: Any,
    grid: ProbeGrid,
    h: float = DEFAULT_FD_STEP,
) -> float:
    """
    sup |omega_zbar - lambda d/dzbar(conj omega)| with
    lambda = (1 - f0^2)/(1 + f0^2); g supplies f0(y).
    """
    omega = _as_field(omega)
    X, Y = grid.points
    f0_sq = np.asarray(g.f0(Y)) ** 2
    ratio = (1.0 - f0_sq) / (1.0 + f0_sq)
    values = omega.dbar(X, Y, h) - ratio * np.conj(omega.dz(X, Y, h))
    return float(np.max(np.abs(values)))
