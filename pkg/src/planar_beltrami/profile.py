"""
Proportionality factor alpha(y) and the quantities derived from it.

This module provides:
- AlphaProfile: alpha, alpha' and alpha'' on a validity interval, backed by a
  preset closed form, a parsed expression or tabulated samples
- antiderivative_A: the antiderivative of alpha normalized at y_ref
- GeneratingFunction: f0 = (c1 sin A + c2 cos A)/sqrt(alpha) on the window
  around an anchor point where it is positive, with the generating pair
  (f0, i/f0)
- schrodinger_potential and vekua_coefficient
- ConductivityPair: the (p, q) coefficients of div(p grad u) + q u = 0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import DomainError, NoPositivityWindow, OutOfDomain
from .expression import parse_expression
from .quadrature import DEFAULT_NODES, DEFAULT_TOL, AntiderivativeTable, Interval, cumulative

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
RealFunction = Callable[[ArrayLike], np.ndarray]
FieldFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Domain used for the worked example: strictly inside the unit disk
EXAMPLE_DOMAIN = Interval(-0.95, 0.95)

SCAN_POINTS = 1025


class ProfileKind(str, Enum):
    """How an AlphaProfile is backed."""

    PRESET = "preset"
    EXPRESSION = "expression"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class AlphaProfile:
    """
    Nonvanishing, continuously differentiable alpha(y) on a closed interval.

    Call the profile for alpha; use deriv and second_deriv for alpha' and
    alpha''. Evaluating outside the domain raises DomainError.
    """

    kind: ProfileKind
    name: str
    domain: Interval
    _value: RealFunction = field(repr=False)
    _deriv: RealFunction = field(repr=False)
    _second: RealFunction = field(repr=False)

    def _checked(self, y: ArrayLike) -> np.ndarray:
        y_arr = np.asarray(y, dtype=float)
        slack = 1e-12 * self.domain.width
        if not self.domain.contains(y_arr, slack):
            outside = y_arr[(y_arr < self.domain.lo - slack) | (y_arr > self.domain.hi + slack)]
            point = float(np.ravel(outside)[0])
            raise DomainError(
                f"y={point!r} is outside the domain [{self.domain.lo}, {self.domain.hi}] "
                f"of profile {self.name!r}",
                point,
            )
        return np.clip(y_arr, self.domain.lo, self.domain.hi)

    def _apply(self, fn: RealFunction, y: ArrayLike) -> ArrayLike:
        values = np.asarray(fn(self._checked(y)), dtype=float)
        if values.shape != np.shape(y):
            values = np.broadcast_to(values, np.shape(y)).copy()
        return values if np.ndim(y) else float(values)

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return self._apply(self._value, y)

    def deriv(self, y: ArrayLike) -> ArrayLike:
        return self._apply(self._deriv, y)

    def second_deriv(self, y: ArrayLike) -> ArrayLike:
        return self._apply(self._second, y)

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def constant(cls, k: float, domain: Interval) -> "AlphaProfile":
        """alpha(y) = k."""
        k = float(k)
        if k == 0 or not np.isfinite(k):
            raise DomainError(f"Constant alpha must be finite and nonzero, got {k}")
        return cls(
            kind=ProfileKind.PRESET,
            name="constant",
            domain=Interval.of(domain),
            _value=lambda y: np.full(np.shape(y), k),
            _deriv=lambda y: np.zeros(np.shape(y)),
            _second=lambda y: np.zeros(np.shape(y)),
        )

    @classmethod
    def inverse_sqrt(cls, domain: Interval = EXAMPLE_DOMAIN) -> "AlphaProfile":
        """alpha(y) = 1/sqrt(1 - y^2), defined for |y| < 1."""
        domain = Interval.of(domain)
        if domain.lo <= -1.0 or domain.hi >= 1.0:
            raise DomainError(
                f"1/sqrt(1-y^2) needs a domain inside (-1, 1), got [{domain.lo}, {domain.hi}]",
                domain.lo if domain.lo <= -1.0 else domain.hi,
            )
        return cls(
            kind=ProfileKind.PRESET,
            name="example_inv_sqrt",
            domain=domain,
            _value=lambda y: (1.0 - y**2) ** -0.5,
            _deriv=lambda y: y * (1.0 - y**2) ** -1.5,
            _second=lambda y: (1.0 + 2.0 * y**2) * (1.0 - y**2) ** -2.5,
        )

    @classmethod
    def tabulated(cls, y: Any, alpha: Any, name: str = "tabulated") -> "AlphaProfile":
        """Cubic-spline profile through samples (y_i, alpha_i)."""
        y = np.asarray(y, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        if y.ndim != 1 or y.shape != alpha.shape or y.size < 4:
            raise DomainError("Tabulated alpha needs matching 1-D arrays of at least 4 samples")
        if np.any(np.diff(y) <= 0):
            raise DomainError("Tabulated y samples must be strictly increasing")
        spline = CubicSpline(y, alpha)
        profile = cls(
            kind=ProfileKind.TABULATED,
            name=name,
            domain=Interval(y[0], y[-1]),
            _value=spline,
            _deriv=spline.derivative(1),
            _second=spline.derivative(2),
        )
        _scan(profile)
        return profile

    @classmethod
    def from_config(cls, spec: dict[str, Any], domain: Optional[Any] = None) -> "AlphaProfile":
        """
        Build a profile from the "alpha" object of a profile config.

        Accepted forms:
            {"preset": "example_inv_sqrt"}
            {"preset": "constant", "k": 2.0}
            {"expression": "1/sqrt(1-y^2)"}
            {"tabulated": {"y": [...], "alpha": [...]}}
        """
        if "preset" in spec:
            preset = spec["preset"]
            if preset == "example_inv_sqrt":
                return cls.inverse_sqrt(domain if domain is not None else EXAMPLE_DOMAIN)
            if preset == "constant":
                if domain is None:
                    raise DomainError("Preset 'constant' requires a domain")
                return cls.constant(spec.get("k", 1.0), domain)
            raise DomainError(f"Unknown alpha preset {preset!r}")
        if "expression" in spec:
            if domain is None:
                raise DomainError("Expression profiles require a domain")
            return parse_alpha(spec["expression"], Interval.of(domain))
        if "tabulated" in spec:
            table = spec["tabulated"]
            return cls.tabulated(table["y"], table["alpha"])
        raise DomainError(f"Unrecognized alpha specification with keys {sorted(spec)}")


def _scan(profile: AlphaProfile) -> None:
    """Reject profiles that vanish, change sign or are not finite on the domain."""
    y = profile.domain.linspace(SCAN_POINTS)
    with np.errstate(all="ignore"):
        values = np.asarray(profile._value(y), dtype=float) * np.ones_like(y)
        slopes = np.asarray(profile._deriv(y), dtype=float) * np.ones_like(y)
    for label, samples in (("alpha", values), ("alpha'", slopes)):
        bad = ~np.isfinite(samples)
        if bad.any():
            point = float(y[bad][0])
            raise DomainError(f"{label} is not finite at y={point!r}", point)
    zero = values == 0
    if zero.any():
        point = float(y[zero][0])
        raise DomainError(f"alpha vanishes at y={point!r}", point)
    flips = np.nonzero(np.sign(values[1:]) != np.sign(values[:-1]))[0]
    if flips.size:
        point = float(y[flips[0] + 1])
        raise DomainError(f"alpha changes sign before y={point!r}", point)


def parse_alpha(expr: str, domain: Interval) -> AlphaProfile:
    """
    Parse a textual alpha(y) and differentiate it symbolically.

    Raises:
        ParseError: If expr does not match the grammar
        DomainError: If alpha is zero, changes sign or is not finite on a
            1025-point scan of the domain
    """
    parsed = parse_expression(expr)
    profile = AlphaProfile(
        kind=ProfileKind.EXPRESSION,
        name=expr,
        domain=Interval.of(domain),
        _value=parsed.compile(0),
        _deriv=parsed.compile(1),
        _second=parsed.compile(2),
    )
    _scan(profile)
    logger.debug("Parsed alpha %r as %s", expr, parsed.expr)
    return profile


def antiderivative_A(
    alpha: AlphaProfile,
    y_ref: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
) -> AntiderivativeTable:
    """Antiderivative of alpha over its domain, zero at y_ref (default: midpoint)."""
    y_ref = alpha.domain.midpoint if y_ref is None else float(y_ref)
    if not alpha.domain.contains(y_ref):
        raise OutOfDomain(
            f"y_ref={y_ref!r} is outside the domain [{alpha.domain.lo}, {alpha.domain.hi}]"
        )
    return cumulative(alpha, y_ref, alpha.domain, tol=tol, n_nodes=n_nodes, f_deriv=alpha.deriv)


# =============================================================================
# Generating function
# =============================================================================


@dataclass(frozen=True, eq=False)
class GeneratingFunction:
    """
    f0(y) = sign * (c1 sin A(y) + c2 cos A(y)) / sqrt(alpha(y)).

    sign is chosen so that f0 > 0 on the positivity window. The amplitude
    sqrt(alpha) f0 is the factor that turns real parts of formal powers into
    solutions of div(alpha^-1 grad B3) + alpha B3 = 0.
    """

    alpha: AlphaProfile
    c1: float
    c2: float
    y_ref: float
    A: AntiderivativeTable
    positivity: Interval
    sign: float

    def amplitude(self, y: ArrayLike) -> ArrayLike:
        """sqrt(alpha) * f0 = sign * (c1 sin A + c2 cos A)."""
        phase = np.asarray(self.A(y))
        out = self.sign * (self.c1 * np.sin(phase) + self.c2 * np.cos(phase))
        return out if np.ndim(y) else float(out)

    def amplitude_deriv(self, y: ArrayLike) -> ArrayLike:
        phase = np.asarray(self.A(y))
        out = self.sign * np.asarray(self.alpha(y)) * (
            self.c1 * np.cos(phase) - self.c2 * np.sin(phase)
        )
        return out if np.ndim(y) else float(out)

    def f0(self, y: ArrayLike) -> ArrayLike:
        out = np.asarray(self.amplitude(y)) / np.sqrt(np.asarray(self.alpha(y)))
        return out if np.ndim(y) else float(out)

    def f0_deriv(self, y: ArrayLike) -> ArrayLike:
        alpha = np.asarray(self.alpha(y))
        out = (
            np.asarray(self.amplitude_deriv(y)) / np.sqrt(alpha)
            - 0.5 * np.asarray(self.alpha.deriv(y)) / alpha * np.asarray(self.f0(y))
        )
        return out if np.ndim(y) else float(out)

    def generating_pair(self, y: ArrayLike) -> tuple[Any, Any]:
        """(F, G) = (f0, i/f0); Im(conj(F) G) = 1."""
        f0 = np.asarray(self.f0(y))
        return f0 + 0j, 1j / f0


def _window_end(
    phase: Callable[[float], float],
    nodes: np.ndarray,
    values: np.ndarray,
    anchor: float,
    upward: bool,
) -> Optional[float]:
    """First root of phase from anchor in one direction, or None if none is found."""
    if upward:
        hits = np.nonzero((nodes > anchor) & (values <= 0))[0]
        if hits.size == 0:
            return None
        j = hits[0]
        return brentq(phase, max(nodes[j - 1], anchor), nodes[j], xtol=1e-12)
    hits = np.nonzero((nodes < anchor) & (values <= 0))[0]
    if hits.size == 0:
        return None
    j = hits[-1]
    return brentq(phase, nodes[j], min(nodes[j + 1], anchor), xtol=1e-12)


def generating_function(
    alpha: AlphaProfile,
    c1: float,
    c2: float,
    y_ref: Optional[float] = None,
    anchor: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    n_nodes: int = DEFAULT_NODES,
    margin: float = 1e-3,
) -> GeneratingFunction:
    """
    Construct f0 and its positivity window.

    Args:
        alpha: Positive profile
        c1, c2: Coefficients of sin A and cos A, not both zero
        y_ref: Point where A vanishes (default: domain midpoint)
        anchor: Point the positivity window grows from (default: y_ref)
        tol, n_nodes: Quadrature settings for A
        margin: Window ends that are roots of f0 are moved inward by
            margin * domain width

    Raises:
        NoPositivityWindow: If c1 = c2 = 0 or f0 vanishes at the anchor
        DomainError: If alpha is not positive on its domain
    """
    c1, c2 = float(c1), float(c2)
    if c1 == 0 and c2 == 0:
        raise NoPositivityWindow("c1 and c2 cannot both be zero")

    scan = alpha.domain.linspace(SCAN_POINTS)
    samples = np.asarray(alpha(scan))
    if np.any(samples <= 0):
        point = float(scan[samples <= 0][0])
        raise DomainError(f"Generating functions need alpha > 0; alpha <= 0 at y={point!r}", point)

    A = antiderivative_A(alpha, y_ref, tol=tol, n_nodes=n_nodes)
    anchor = A.base_point if anchor is None else float(anchor)
    if not alpha.domain.contains(anchor):
        raise OutOfDomain(f"Anchor {anchor!r} is outside the domain of alpha")

    def phase(y: ArrayLike) -> Any:
        a = A(y)
        return c1 * np.sin(a) + c2 * np.cos(a)

    at_anchor = float(phase(anchor))
    if abs(at_anchor) <= 1e-14 * np.hypot(c1, c2):
        raise NoPositivityWindow(f"f0 vanishes at the anchor point y={anchor!r}")
    sign = 1.0 if at_anchor > 0 else -1.0

    def signed(y: float) -> float:
        return sign * float(phase(y))

    values = sign * phase(A.nodes)
    pull = margin * alpha.domain.width
    upper = _window_end(signed, A.nodes, values, anchor, upward=True)
    lower = _window_end(signed, A.nodes, values, anchor, upward=False)
    hi = alpha.domain.hi if upper is None else upper - pull
    lo = alpha.domain.lo if lower is None else lower + pull
    if not lo < anchor < hi and not (lo <= anchor <= hi and lo < hi):
        raise NoPositivityWindow(
            f"Positivity window around y={anchor!r} is narrower than the margin"
        )

    logger.debug("Positivity window of f0: [%.12g, %.12g] (sign %+d)", lo, hi, int(sign))
    return GeneratingFunction(
        alpha=alpha,
        c1=c1,
        c2=c2,
        y_ref=A.base_point,
        A=A,
        positivity=Interval(lo, hi),
        sign=sign,
    )


def schrodinger_potential(alpha: AlphaProfile) -> RealFunction:
    """r(y) = -alpha''/(2 alpha) + 3/4 (alpha'/alpha)^2 - alpha^2."""

    def r(y: ArrayLike) -> ArrayLike:
        a = np.asarray(alpha(y))
        ratio = np.asarray(alpha.deriv(y)) / a
        out = -0.5 * np.asarray(alpha.second_deriv(y)) / a + 0.75 * ratio**2 - a**2
        return out if np.ndim(y) else float(out)

    return r


def _require_window(g: GeneratingFunction, y: ArrayLike) -> None:
    if not g.positivity.contains(y, 1e-12 * g.positivity.width):
        raise OutOfDomain(
            f"Points outside the positivity window [{g.positivity.lo}, {g.positivity.hi}]"
        )


def vekua_coefficient(g: GeneratingFunction) -> Callable[[ArrayLike], Any]:
    """y -> i f0'(y) / (2 f0(y)), the coefficient of conj(W) in the Vekua equation."""

    def coefficient(y: ArrayLike) -> Any:
        _require_window(g, y)
        out = 0.5j * np.asarray(g.f0_deriv(y)) / np.asarray(g.f0(y))
        return out if np.ndim(y) else complex(out)

    return coefficient


def cot_form_coefficient(g: GeneratingFunction) -> Callable[[ArrayLike], Any]:
    """
    The same coefficient written through A:
    (i/2) (alpha (c1 cos A - c2 sin A)/(c1 sin A + c2 cos A) - alpha'/(2 alpha)),
    which for c1 = 1, c2 = 0 is (i/2)(alpha cot A - alpha'/(2 alpha)).
    """

    def coefficient(y: ArrayLike) -> Any:
        _require_window(g, y)
        phase = np.asarray(g.A(y))
        alpha = np.asarray(g.alpha(y))
        ratio = (g.c1 * np.cos(phase) - g.c2 * np.sin(phase)) / (
            g.c1 * np.sin(phase) + g.c2 * np.cos(phase)
        )
        out = 0.5j * (alpha * ratio - 0.5 * np.asarray(g.alpha.deriv(y)) / alpha)
        return out if np.ndim(y) else complex(out)

    return coefficient


# =============================================================================
# Conductivity pair
# =============================================================================


@dataclass(frozen=True)
class ConductivityPair:
    """
    Coefficients of (div p grad + q) u = 0.

    p_grad, when given, returns the analytic (p_x, p_y); otherwise gradients
    of p are taken by finite differences.
    """

    p: FieldFunction
    q: FieldFunction
    p_grad: Optional[Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]] = None

    @classmethod
    def beltrami(cls, alpha: AlphaProfile) -> "ConductivityPair":
        """p = 1/alpha, q = alpha, the pair of div(alpha^-1 grad B3) + alpha B3 = 0."""

        def p(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            return np.broadcast_to(1.0 / np.asarray(alpha(y)), np.broadcast(x, y).shape)

        def q(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            return np.broadcast_to(np.asarray(alpha(y)), np.broadcast(x, y).shape)

        def p_grad(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            shape = np.broadcast(x, y).shape
            a = np.asarray(alpha(y))
            py = -np.asarray(alpha.deriv(y)) / a**2
            return np.zeros(shape), np.broadcast_to(py, shape)

        return cls(p=p, q=q, p_grad=p_grad)

    @classmethod
    def harmonic(cls) -> "ConductivityPair":
        """p = 1, q = 0: the Laplace equation."""
        return cls(
            p=lambda x, y: np.ones(np.broadcast(x, y).shape),
            q=lambda x, y: np.zeros(np.broadcast(x, y).shape),
            p_grad=lambda x, y: (
                np.zeros(np.broadcast(x, y).shape),
                np.zeros(np.broadcast(x, y).shape),
            ),
        )
