"""
Closed-form solutions used as oracles.

Two families are covered:

- alpha = 1/sqrt(1 - y^2) with c1 = 0, c2 = 1, y_ref = 0 and z0 = 0, where
  f0 = (1 - y^2)^(3/4) and the formal powers up to order 3 and the fields
  B_0 ... B_6 are elementary functions of x, y and arcsin y
- alpha = k constant, where A = k (y - y_ref), f0 = (c1 sin A + c2 cos A)/sqrt(k)
  and r = -k^2

Notation below: s = sqrt(1 - y^2), A = arcsin y, w = 1 - y^2.
"""

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import DomainError

FieldTriple = tuple[Any, Any, Any]


# =============================================================================
# Inverse square-root profile
# =============================================================================


def _aux(y: Any) -> tuple[Any, Any, Any]:
    y = np.asarray(y, dtype=float)
    w = 1.0 - y**2
    return w, np.sqrt(w), np.arcsin(y)


def example_f0(y: Any) -> Any:
    return (1.0 - np.asarray(y, dtype=float) ** 2) ** 0.75


def example_Y1(y: Any) -> Any:
    w, s, A = _aux(y)
    return y * w**1.5 / 4.0 + 3.0 * y * s / 8.0 + 3.0 * A / 8.0


def example_Y2(y: Any) -> Any:
    w, s, A = _aux(y)
    return y**2 / 4.0 + 0.75 * y * A / s


def example_Y3(y: Any) -> Any:
    w, s, A = _aux(y)
    return (
        -y * w**2.5 / 8.0
        + y * w**1.5 / 32.0
        + y * s * (51.0 / 128.0 - 9.0 * y**2 / 64.0)
        - 9.0 * w**2 * A / 16.0
        + 33.0 * A / 128.0
    )


def example_Ytilde1(y: Any) -> Any:
    return np.asarray(y) / np.sqrt(1.0 - np.asarray(y) ** 2)


def example_Ytilde2(y: Any) -> Any:
    return np.asarray(y) ** 2 - np.asarray(y) ** 4 / 2.0


def example_Ytilde3(y: Any) -> Any:
    w, s, A = _aux(y)
    return 0.75 * y * (1.0 + y**2) / s - 0.75 * A


def example_formal_power(n: int, a: complex, x: Any, y: Any) -> Any:
    """Z(n, a) for n <= 3 around z0 = 0, linear in a."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if n == 0:
        return complex(a) * np.ones(np.broadcast(x, y).shape)
    if n == 1:
        unit = x + 1j * example_Y1(y)
        imag = -example_Ytilde1(y) + 1j * x
    elif n == 2:
        unit = x**2 - example_Y2(y) + 2j * x * example_Y1(y)
        imag = -2.0 * x * example_Ytilde1(y) + 1j * (x**2 - example_Ytilde2(y))
    elif n == 3:
        unit = x**3 - 3.0 * x * example_Y2(y) + 1j * (3.0 * x**2 * example_Y1(y) - example_Y3(y))
        imag = -3.0 * x**2 * example_Ytilde1(y) + example_Ytilde3(y) + 1j * (
            x**3 - 3.0 * x * example_Ytilde2(y)
        )
    else:
        raise ValueError(f"Closed forms are available for n <= 3, got {n}")
    a = complex(a)
    return a.real * unit + a.imag * imag


def _b0(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return y + 0 * x, 0 * x * y, s + 0 * x


def _b1(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return x * y, w + 0 * x, x * s


def _b2(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return s + 0 * x, 0 * x * y, -y + 0 * x


def _b3(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return (
        0.75 * s * A + y * (x**2 - 0.75 * y**2 + 1.25),
        2.0 * x * w,
        s * (x**2 - y**2 / 4.0) - 0.75 * y * A,
    )


def _b4(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return 2.0 * x * s, -2.0 * y * s + 0 * x, -2.0 * x * y


def _b5(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return (
        2.25 * x * s * A + y * (x**3 - 2.25 * x * y**2 + 3.75 * x),
        (3.0 * x**2 - 0.75 * y**2) * w - 2.25 * y * s * A,
        s * x**3 - 3.0 * x * (s * y**2 / 4.0 + 0.75 * y * A),
    )


def _b6(x: Any, y: Any) -> FieldTriple:
    w, s, A = _aux(y)
    return (
        (3.0 * x**2 - 2.25 * y**2) * s - 0.75 * y * A,
        -6.0 * x * y * s,
        -3.0 * x**2 * y + 0.75 * y * (1.0 + y**2) - 0.75 * s * A,
    )


EXAMPLE_FIELDS: tuple[Callable[[Any, Any], FieldTriple], ...] = (
    _b0,
    _b1,
    _b2,
    _b3,
    _b4,
    _b5,
    _b6,
)


def example_field(index: int, x: Any, y: Any) -> FieldTriple:
    """(B1, B2, B3) of the basis field with the given index (0..6) in basis order."""
    if not 0 <= index < len(EXAMPLE_FIELDS):
        raise ValueError(f"Closed-form fields exist for indices 0..6, got {index}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return EXAMPLE_FIELDS[index](x, y)


# =============================================================================
# Constant alpha
# =============================================================================


@dataclass(frozen=True)
class ConstantAlphaElements:
    """
    Closed forms for alpha = k > 0.

    With theta(y) = k (y - y_ref) + phi, R = hypot(c1, c2) and
    phi = atan2(c2, c1), c1 sin A + c2 cos A = R sin(theta). sign is +1 or
    -1 so that the amplitude is positive near y0.
    """

    k: float
    c1: float
    c2: float
    y_ref: float
    z0: complex
    sign: float

    @property
    def radius(self) -> float:
        return float(np.hypot(self.c1, self.c2))

    def theta(self, y: Any) -> Any:
        phase = np.arctan2(self.c2, self.c1)
        return self.k * (np.asarray(y, dtype=float) - self.y_ref) + phase

    def A(self, y: Any) -> Any:
        return self.k * (np.asarray(y, dtype=float) - self.y_ref)

    def amplitude(self, y: Any) -> Any:
        return self.sign * self.radius * np.sin(self.theta(y))

    def f0(self, y: Any) -> Any:
        return self.amplitude(y) / np.sqrt(self.k)

    def potential(self, y: Any) -> Any:
        return np.full(np.shape(y), -self.k**2)

    def b3_0u(self, x: Any, y: Any) -> Any:
        return self.amplitude(y) + 0 * np.asarray(x, dtype=float)

    def b3_1u(self, x: Any, y: Any) -> Any:
        return (np.asarray(x, dtype=float) - self.z0.real) * self.amplitude(y)

    def b3_1v(self, x: Any, y: Any) -> Any:
        theta = self.theta(y)
        cot0 = 1.0 / np.tan(self.theta(self.z0.imag))
        values = self.sign * (np.cos(theta) - np.sin(theta) * cot0) / self.radius
        return values + 0 * np.asarray(x, dtype=float)

    def elements(self) -> dict[str, Callable[[Any, Any], Any]]:
        return {"B3[0,u]": self.b3_0u, "B3[1,u]": self.b3_1u, "B3[1,v]": self.b3_1v}


def constant_alpha_elements(
    k: float, c1: float, c2: float, y_ref: float, z0: complex
) -> ConstantAlphaElements:
    """
    Closed forms for alpha = k; the sign convention matches generating_function
    with the anchor at Im z0.

    Raises:
        DomainError: If k <= 0 or the amplitude vanishes at Im z0
    """
    if k <= 0:
        raise DomainError(f"Constant-alpha closed forms need k > 0, got {k}")
    z0 = complex(z0)
    probe = ConstantAlphaElements(k, c1, c2, y_ref, z0, 1.0)
    at_anchor = float(probe.amplitude(z0.imag))
    if at_anchor == 0:
        raise DomainError("Amplitude vanishes at Im z0", z0.imag)
    return ConstantAlphaElements(k, c1, c2, y_ref, z0, 1.0 if at_anchor > 0 else -1.0)
