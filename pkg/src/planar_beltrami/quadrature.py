"""
One-dimensional adaptive quadrature and cumulative antiderivative tables.

Every y-integral of the construction (the antiderivative of alpha and each
level of the formal power recursions) is computed here. Integrals are summed
over panels with a 10/20-point Gauss-Legendre pair; panels whose two
estimates disagree are bisected until they agree or the budget runs out.

Integrands are vectorized: they receive a numpy array of abscissae and must
return an array of the same shape (a scalar result is broadcast).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BPoly, CubicHermiteSpline

from .errors import NonConvergence, NonFiniteSample, OutOfDomain

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_NODES = 2049
MIN_NODES = 32

# Bisection budget per original panel, and cap on simultaneously active panels
MAX_DEPTH = 40
MAX_PANELS = 500_000

_COARSE_X, _COARSE_W = leggauss(10)
_FINE_X, _FINE_W = leggauss(20)
_ABSCISSAE = np.concatenate([_COARSE_X, _FINE_X])
_N_COARSE = _COARSE_X.size

ArrayLike = Union[float, np.ndarray]
RealFunction = Callable[[np.ndarray], Any]
SegmentFunction = Callable[[np.ndarray, np.ndarray], Any]


@dataclass(frozen=True)
class Interval:
    """Closed, bounded interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"Interval bounds must be finite, got [{lo}, {hi}]")
        if not lo < hi:
            raise ValueError(f"Interval requires lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def of(cls, bounds: Union["Interval", tuple[float, float], list[float]]) -> "Interval":
        """Coerce a (lo, hi) pair to an Interval."""
        if isinstance(bounds, Interval):
            return bounds
        lo, hi = bounds
        return cls(lo, hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, y: ArrayLike, slack: float = 0.0) -> bool:
        """True when every value of y lies in [lo - slack, hi + slack]."""
        y = np.asarray(y, dtype=float)
        return bool(np.all((y >= self.lo - slack) & (y <= self.hi + slack)))

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def linspace(self, count: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, count)

    def to_list(self) -> list[float]:
        return [self.lo, self.hi]


# =============================================================================
# Adaptive panel engine
# =============================================================================


def _sample(f: RealFunction, t: np.ndarray) -> np.ndarray:
    """Evaluate a vectorized integrand and reject non-finite values."""
    values = np.asarray(f(t), dtype=float)
    if values.shape != t.shape:
        values = np.broadcast_to(values, t.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        raise NonFiniteSample(float(np.asarray(t)[bad][0]))
    return values


def _adaptive_sum(
    f: SegmentFunction, lo: np.ndarray, hi: np.ndarray, tol: float
) -> np.ndarray:
    """
    Integrate f over each segment [lo[k], hi[k]].

    f is called as f(t, owner) with t of shape (m, 30) and owner of shape
    (m, 1) holding the index of the segment each row belongs to. A sub-panel
    is accepted when |G20 - G10| <= tol * max(fraction, |G20|), where
    fraction is its share of the original segment length.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")

    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    total = np.zeros(lo.shape)
    span = np.abs(hi - lo)

    owner = np.nonzero(span > 0)[0]
    a = lo[owner]
    b = hi[owner]

    for depth in range(MAX_DEPTH + 1):
        if owner.size == 0:
            return total
        if owner.size > MAX_PANELS:
            break

        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        t = mid[:, None] + half[:, None] * _ABSCISSAE[None, :]
        values = np.asarray(f(t, owner[:, None]), dtype=float)
        if values.shape != t.shape:
            values = np.broadcast_to(values, t.shape)
        bad = ~np.isfinite(values)
        if bad.any():
            raise NonFiniteSample(float(t[bad][0]))

        coarse = half * (values[:, :_N_COARSE] @ _COARSE_W)
        fine = half * (values[:, _N_COARSE:] @ _FINE_W)
        error = np.abs(fine - coarse)
        fraction = np.abs(b - a) / span[owner]
        done = error <= tol * np.maximum(fraction, np.abs(fine))

        np.add.at(total, owner[done], fine[done])

        keep = ~done
        if keep.any():
            logger.debug("Bisecting %d panels at depth %d", int(keep.sum()), depth)
        owner = np.repeat(owner[keep], 2)
        a_k, mid_k, b_k = a[keep], mid[keep], b[keep]
        a = np.column_stack([a_k, mid_k]).ravel()
        b = np.column_stack([mid_k, b_k]).ravel()

    raise NonConvergence(
        f"Adaptive quadrature did not reach tol={tol:g} "
        f"({owner.size} panels unresolved)",
        panels=int(owner.size),
    )


def integrate(f: RealFunction, interval: Interval, tol: float = DEFAULT_TOL) -> float:
    """
    Integrate f over an interval.

    Args:
        f: Vectorized integrand y -> f(y)
        interval: Integration interval
        tol: Target error relative to max(1, |result|)

    Returns:
        The integral estimate

    Raises:
        NonConvergence: If the subdivision budget is exhausted
        NonFiniteSample: If f returns NaN or an infinity
    """
    interval = Interval.of(interval)
    result = _adaptive_sum(
        lambda t, owner: _sample(f, t),
        np.array([interval.lo]),
        np.array([interval.hi]),
        tol,
    )
    return float(result[0])


def integrate_segments(
    f: SegmentFunction, lo: ArrayLike, hi: ArrayLike, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """
    Integrate a family of integrands, one per segment.

    f(t, k) receives abscissae t of shape (m, q) and segment indices k of
    shape (m, 1); row i of t lies in segment k[i]. Segments with lo > hi
    integrate with the usual orientation sign; empty segments give 0.

    Returns:
        Array of integrals with the broadcast shape of lo and hi
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    shape = lo.shape
    result = _adaptive_sum(f, lo.ravel(), hi.ravel(), tol)
    return result.reshape(shape)


# =============================================================================
# Antiderivative tables
# =============================================================================


@dataclass(frozen=True, eq=False)
class AntiderivativeTable:
    """
    Tabulated antiderivative T(y) = integral of f from base_point to y.

    Values are exact sums of panel integrals at the nodes; between nodes the
    table interpolates with a Hermite polynomial that also matches the
    integrand (order 3) or the integrand and its derivative (order 5) at
    every node, so table_deriv reproduces f exactly at the nodes.
    """

    base_point: float
    interval: Interval
    nodes: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    order: int
    _interp: Any = field(repr=False)
    _slope: Any = field(repr=False)

    def _checked(self, y: ArrayLike) -> np.ndarray:
        y_arr = np.asarray(y, dtype=float)
        slack = 1e-12 * self.interval.width
        if not self.interval.contains(y_arr, slack):
            bad = y_arr[(y_arr < self.interval.lo - slack) | (y_arr > self.interval.hi + slack)]
            raise OutOfDomain(
                f"y={float(np.ravel(bad)[0])!r} is outside the table range "
                f"[{self.interval.lo}, {self.interval.hi}]"
            )
        return np.clip(y_arr, self.interval.lo, self.interval.hi)

    def __call__(self, y: ArrayLike) -> ArrayLike:
        y_arr = self._checked(y)
        out = np.where(y_arr == self.base_point, 0.0, self._interp(y_arr))
        return out if np.ndim(y) else float(out)

    def deriv(self, y: ArrayLike) -> ArrayLike:
        y_arr = self._checked(y)
        out = self._slope(y_arr)
        return out if np.ndim(y) else float(out)


def _node_layout(interval: Interval, base_point: float, n_nodes: int) -> tuple[np.ndarray, int]:
    """Uniform nodes with base_point placed exactly on a node."""
    nodes = interval.linspace(n_nodes)
    spacing = interval.width / (n_nodes - 1)
    nearest = int(np.argmin(np.abs(nodes - base_point)))
    if abs(nodes[nearest] - base_point) <= 1e-3 * spacing:
        nodes[nearest] = base_point
        return nodes, nearest
    position = int(np.searchsorted(nodes, base_point))
    return np.insert(nodes, position, base_point), position


def cumulative(
    f: RealFunction,
    base_point: float,
    interval: Interval,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
    f_deriv: Optional[RealFunction] = None,
) -> AntiderivativeTable:
    """
    Build the antiderivative table of f normalized to vanish at base_point.

    Args:
        f: Vectorized integrand
        base_point: Point where the table equals 0; must lie in interval
        interval: Table range
        tol: Per-panel quadrature tolerance
        n_nodes: Number of uniform nodes (>= 32)
        f_deriv: Optional derivative of f; switches to quintic Hermite interpolation

    Raises:
        OutOfDomain: If base_point is outside interval
        NonConvergence, NonFiniteSample: Propagated from the quadrature
    """
    interval = Interval.of(interval)
    if n_nodes < MIN_NODES:
        raise ValueError(f"n_nodes must be at least {MIN_NODES}, got {n_nodes}")
    if not interval.contains(base_point):
        raise OutOfDomain(
            f"Base point {base_point!r} is outside [{interval.lo}, {interval.hi}]"
        )

    nodes, base_index = _node_layout(interval, float(base_point), n_nodes)
    panels = _adaptive_sum(lambda t, owner: _sample(f, t), nodes[:-1], nodes[1:], tol)
    running = np.concatenate([[0.0], np.cumsum(panels)])
    values = running - running[base_index]
    values[base_index] = 0.0

    slopes = _sample(f, nodes)
    if f_deriv is not None:
        curvature = _sample(f_deriv, nodes)
        interp = BPoly.from_derivatives(nodes, np.column_stack([values, slopes, curvature]))
        order = 5
    else:
        interp = CubicHermiteSpline(nodes, values, slopes)
        order = 3

    logger.debug(
        "Built order-%d antiderivative table on [%g, %g] with %d nodes, base %g",
        order,
        interval.lo,
        interval.hi,
        nodes.size,
        base_point,
    )
    return AntiderivativeTable(
        base_point=float(base_point),
        interval=interval,
        nodes=nodes,
        values=values,
        slopes=slopes,
        order=order,
        _interp=interp,
        _slope=interp.derivative(),
    )


def table_eval(table: AntiderivativeTable, y: ArrayLike) -> ArrayLike:
    """Interpolated table value at y."""
    return table(y)


def table_deriv(table: AntiderivativeTable, y: ArrayLike) -> ArrayLike:
    """Derivative of the interpolated table at y."""
    return table.deriv(y)
