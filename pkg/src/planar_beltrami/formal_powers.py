"""
Formal powers for the Vekua equation with a generating function f0(y).

The recursive families are tabulated once per base point::

    Y[0] = Ytilde[0] = 1
    Y[n]      = n * integral(Y[n-1] * f0^2)   n odd,   n * integral(Y[n-1] / f0^2)   n even
    Ytilde[n] = n * integral(Ytilde[n-1] / f0^2)  n odd,  n * integral(Ytilde[n-1] * f0^2)  n even

with every integral running from y0 to y. The formal power of order n with
coefficient a = a1 + i a2 is then::

    Z(n, a) = a1 * sum_k C(n,k) (x-x0)^(n-k) i^k Y[k]
            + i a2 * sum_k C(n,k) (x-x0)^(n-k) i^k Ytilde[k]

Z is a solution of the second-kind system phi_x = psi_y/f0^2,
phi_y = -psi_x/f0^2, and W = f0 Re Z + i Im Z / f0 solves the Vekua
equation W_zbar = (f0_zbar/f0) conj(W).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Protocol, Union

import numpy as np

from .errors import NOrderExceeded, OutOfDomain
from .quadrature import DEFAULT_NODES, DEFAULT_TOL, AntiderivativeTable, Interval, cumulative
from .vekua import DEFAULT_FD_STEP, ProbeGrid, partials

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class GeneratingPair(Protocol):
    """What the recursions need from a generating function."""

    positivity: Interval

    def f0(self, y: ArrayLike) -> ArrayLike: ...

    def f0_deriv(self, y: ArrayLike) -> ArrayLike: ...


@dataclass(frozen=True)
class UnitGenerator:
    """The trivial generating function f0 = 1, for which Z(n, a) = a (z - z0)^n."""

    positivity: Interval

    def f0(self, y: ArrayLike) -> ArrayLike:
        return np.ones_like(np.asarray(y, dtype=float)) if np.ndim(y) else 1.0

    def f0_deriv(self, y: ArrayLike) -> ArrayLike:
        return np.zeros_like(np.asarray(y, dtype=float)) if np.ndim(y) else 0.0


def binomials(n: int) -> np.ndarray:
    """C(n, k) for k = 0..n by multiplicative recurrence (exact in float64 for n <= 56)."""
    coefficients = np.ones(n + 1)
    for k in range(1, n + 1):
        coefficients[k] = coefficients[k - 1] * (n - k + 1) / k
    return coefficients


# =============================================================================
# Recursion tables
# =============================================================================


def _weight(g: GeneratingPair, odd_uses_f0_squared: bool, k: int, y: np.ndarray):
    """Weight of level k and its derivative: f0^2 or 1/f0^2 depending on parity."""
    f0 = np.asarray(g.f0(y), dtype=float)
    f0p = np.asarray(g.f0_deriv(y), dtype=float)
    squared = (k % 2 == 1) == odd_uses_f0_squared
    if squared:
        return f0 * f0, 2.0 * f0 * f0p
    return 1.0 / (f0 * f0), -2.0 * f0p / f0**3


@dataclass(frozen=True, eq=False)
class RecursionTable:
    """Tabulated Y[k] and Ytilde[k], k = 0..n_max, normalized at y0."""

    g: GeneratingPair
    y0: float
    n_max: int
    _y_tables: tuple[AntiderivativeTable, ...] = field(repr=False)
    _ytilde_tables: tuple[AntiderivativeTable, ...] = field(repr=False)

    def _level(self, tables: tuple, k: int, y: ArrayLike) -> np.ndarray:
        if k > self.n_max:
            raise NOrderExceeded(f"Level {k} requested but tables stop at {self.n_max}")
        if k == 0:
            return np.ones_like(np.asarray(y, dtype=float))
        return np.asarray(tables[k - 1](y))

    def _level_deriv(self, tables: tuple, odd_squared: bool, k: int, y: ArrayLike) -> np.ndarray:
        if k == 0:
            return np.zeros_like(np.asarray(y, dtype=float))
        weight, _ = _weight(self.g, odd_squared, k, np.asarray(y, dtype=float))
        return k * self._level(tables, k - 1, y) * weight

    def Y(self, k: int, y: ArrayLike) -> np.ndarray:
        return self._level(self._y_tables, k, y)

    def Ytilde(self, k: int, y: ArrayLike) -> np.ndarray:
        return self._level(self._ytilde_tables, k, y)

    def Y_deriv(self, k: int, y: ArrayLike) -> np.ndarray:
        """d/dy Y[k] from the recursion identity, not from the interpolant."""
        return self._level_deriv(self._y_tables, True, k, y)

    def Ytilde_deriv(self, k: int, y: ArrayLike) -> np.ndarray:
        return self._level_deriv(self._ytilde_tables, False, k, y)


def _build_family(
    g: GeneratingPair,
    y0: float,
    n_max: int,
    odd_squared: bool,
    tol: float,
    n_nodes: int,
) -> tuple[AntiderivativeTable, ...]:
    tables: list[AntiderivativeTable] = []

    def previous(k: int, y: np.ndarray) -> np.ndarray:
        return np.ones_like(y) if k == 0 else np.asarray(tables[k - 1](y))

    def previous_deriv(k: int, y: np.ndarray) -> np.ndarray:
        if k == 0:
            return np.zeros_like(y)
        weight, _ = _weight(g, odd_squared, k, y)
        return k * previous(k - 1, y) * weight

    for n in range(1, n_max + 1):

        def integrand(y: np.ndarray, n: int = n) -> np.ndarray:
            weight, _ = _weight(g, odd_squared, n, y)
            return n * previous(n - 1, y) * weight

        def integrand_deriv(y: np.ndarray, n: int = n) -> np.ndarray:
            weight, weight_deriv = _weight(g, odd_squared, n, y)
            return n * (previous_deriv(n - 1, y) * weight + previous(n - 1, y) * weight_deriv)

        tables.append(
            cumulative(
                integrand,
                y0,
                g.positivity,
                tol=tol,
                n_nodes=n_nodes,
                f_deriv=integrand_deriv,
            )
        )
    return tuple(tables)


def build_recursion(
    g: GeneratingPair,
    y0: float,
    n_max: int,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
) -> RecursionTable:
    """
    Tabulate both recursive families up to n_max over the positivity window.

    Raises:
        OutOfDomain: If y0 is outside the positivity window
        NonConvergence, NonFiniteSample: From the quadrature
    """
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    if not g.positivity.contains(y0):
        raise OutOfDomain(
            f"y0={y0!r} is outside the positivity window "
            f"[{g.positivity.lo}, {g.positivity.hi}]"
        )
    y_tables = _build_family(g, float(y0), n_max, True, tol, n_nodes)
    ytilde_tables = _build_family(g, float(y0), n_max, False, tol, n_nodes)
    logger.debug("Built recursion tables up to n=%d at y0=%g", n_max, y0)
    return RecursionTable(
        g=g, y0=float(y0), n_max=n_max, _y_tables=y_tables, _ytilde_tables=ytilde_tables
    )


# =============================================================================
# Formal powers
# =============================================================================


class PowerParts(NamedTuple):
    """Real and imaginary groups of the two binomial sums of a formal power."""

    y_real: np.ndarray
    y_imag: np.ndarray
    ytilde_real: np.ndarray
    ytilde_imag: np.ndarray

    def combine(self, a: complex) -> np.ndarray:
        a1, a2 = a.real, a.imag
        real = a1 * self.y_real - a2 * self.ytilde_imag
        imag = a1 * self.y_imag + a2 * self.ytilde_real
        return real + 1j * imag


@dataclass(frozen=True, eq=False)
class FormalPowerBasis:
    """Evaluator of Z(n, a) around z0 = x0 + i y0 for n <= n_max."""

    table: RecursionTable
    z0: complex

    @property
    def n_max(self) -> int:
        return self.table.n_max

    @property
    def g(self) -> GeneratingPair:
        return self.table.g

    def _check(self, n: int, y: np.ndarray) -> None:
        if n < 0:
            raise ValueError(f"Formal power order must be nonnegative, got {n}")
        if n > self.n_max:
            raise NOrderExceeded(f"Order {n} exceeds the built n_max={self.n_max}")
        window = self.g.positivity
        if not window.contains(y, 1e-12 * window.width):
            raise OutOfDomain(
                f"Points outside the positivity window [{window.lo}, {window.hi}]"
            )

    def parts(self, n: int, x: ArrayLike, y: ArrayLike) -> PowerParts:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        self._check(n, y)
        dx = x - self.z0.real
        groups = [np.zeros(x.shape) for _ in range(4)]
        for k, c in enumerate(binomials(n)):
            term = c * (-1.0) ** (k // 2) * dx ** (n - k)
            slot = k % 2
            groups[slot] = groups[slot] + term * self.table.Y(k, y)
            groups[2 + slot] = groups[2 + slot] + term * self.table.Ytilde(k, y)
        return PowerParts(*groups)

    def parts_grad(self, n: int, x: ArrayLike, y: ArrayLike) -> tuple[PowerParts, PowerParts]:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        self._check(n, y)
        dx = x - self.z0.real
        gx = [np.zeros(x.shape) for _ in range(4)]
        gy = [np.zeros(x.shape) for _ in range(4)]
        for k, c in enumerate(binomials(n)):
            sign = c * (-1.0) ** (k // 2)
            slot = k % 2
            if k < n:
                dterm = sign * (n - k) * dx ** (n - k - 1)
                gx[slot] = gx[slot] + dterm * self.table.Y(k, y)
                gx[2 + slot] = gx[2 + slot] + dterm * self.table.Ytilde(k, y)
            if k > 0:
                term = sign * dx ** (n - k)
                gy[slot] = gy[slot] + term * self.table.Y_deriv(k, y)
                gy[2 + slot] = gy[2 + slot] + term * self.table.Ytilde_deriv(k, y)
        return PowerParts(*gx), PowerParts(*gy)

    def evaluate(self, a: complex, n: int, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        return self.parts(n, x, y).combine(complex(a))

    def gradient(
        self, a: complex, n: int, x: ArrayLike, y: ArrayLike
    ) -> tuple[np.ndarray, np.ndarray]:
        gx, gy = self.parts_grad(n, x, y)
        return gx.combine(complex(a)), gy.combine(complex(a))


def formal_basis(
    g: GeneratingPair,
    z0: complex,
    n_max: int,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
) -> FormalPowerBasis:
    """Build the recursion at Im z0 and wrap it in a FormalPowerBasis."""
    z0 = complex(z0)
    return FormalPowerBasis(build_recursion(g, z0.imag, n_max, tol, n_nodes), z0)


def _unpack(z: Any) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=complex)
    return z.real, z.imag


def _scalar(values: np.ndarray, like: Any) -> Any:
    return values if np.ndim(like) else complex(values)


def formal_power(basis: FormalPowerBasis, a: complex, n: int, z: Any) -> Any:
    """
    Z(n, a) at z (scalar or array).

    Raises:
        NOrderExceeded: If n > basis.n_max
        OutOfDomain: If Im z is outside the positivity window
    """
    x, y = _unpack(z)
    return _scalar(basis.evaluate(a, n, x, y), z)


def formal_power_grad(basis: FormalPowerBasis, a: complex, n: int, z: Any) -> tuple[Any, Any]:
    """(d/dx, d/dy) of Z(n, a) at z."""
    x, y = _unpack(z)
    gx, gy = basis.gradient(a, n, x, y)
    return _scalar(gx, z), _scalar(gy, z)


def first_kind(basis: FormalPowerBasis, a: complex, n: int, z: Any) -> Any:
    """W = f0 Re Z + i Im Z / f0, the Vekua-equation solution attached to Z(n, a)."""
    x, y = _unpack(z)
    omega = basis.evaluate(a, n, x, y)
    f0 = np.asarray(basis.g.f0(y))
    return _scalar(f0 * omega.real + 1j * omega.imag / f0, z)


# =============================================================================
# Second-kind system
# =============================================================================


@dataclass(frozen=True)
class SecondKindPair:
    """phi = Re Z, psi = Im Z and the sup-residual of their first-order system."""

    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    psi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    residual: float


def default_grid(basis: FormalPowerBasis, count: int = 9) -> ProbeGrid:
    """Square probe grid centred on z0 inside the positivity window."""
    window = basis.g.positivity
    x0, y0 = basis.z0.real, basis.z0.imag
    shrink = 0.1 * window.width
    lo = max(window.lo + shrink, y0 - 0.5)
    hi = min(window.hi - shrink, y0 + 0.5)
    return ProbeGrid.rectangle((x0 - 0.5, x0 + 0.5, count), (lo, hi, count))


def second_kind_pair(
    basis: FormalPowerBasis,
    n: int,
    a: complex = 1.0,
    grid: Optional[ProbeGrid] = None,
    h: float = DEFAULT_FD_STEP,
) -> SecondKindPair:
    """
    Split Z(n, a) into (phi, psi) and check phi_x = psi_y/f0^2, phi_y = -psi_x/f0^2
    by finite differences on the probe grid.
    """
    if n > basis.n_max:
        raise NOrderExceeded(f"Order {n} exceeds the built n_max={basis.n_max}")
    grid = grid if grid is not None else default_grid(basis)

    def phi(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return basis.evaluate(a, n, x, y).real

    def psi(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return basis.evaluate(a, n, x, y).imag

    X, Y = grid.points
    phi_x, phi_y = partials(phi, X, Y, h)
    psi_x, psi_y = partials(psi, X, Y, h)
    f0_sq = np.asarray(basis.g.f0(Y)) ** 2
    residual = max(
        float(np.max(np.abs(phi_x - psi_y / f0_sq))),
        float(np.max(np.abs(phi_y + psi_x / f0_sq))),
    )
    logger.debug("Second-kind residual for n=%d, a=%s: %.3e", n, a, residual)
    return SecondKindPair(phi=phi, psi=psi, residual=residual)


def normalization_ratio(
    basis: FormalPowerBasis, a: complex, n: int, radius: float, count: int = 64
) -> tuple[float, float]:
    """
    min and max of |Z(n, a)| / (|a| radius^n) on the circle |z - z0| = radius.

    A diagnostic of how closely Z(n, a) follows a (z - z0)^n near z0.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if a == 0:
        raise ValueError("a must be nonzero")
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    z = basis.z0 + radius * np.exp(1j * theta)
    ratio = np.abs(formal_power(basis, a, n, z)) / (abs(a) * radius**n)
    return float(ratio.min()), float(ratio.max())
