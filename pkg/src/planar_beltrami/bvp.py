"""
Least-squares boundary collocation with the B3 basis.

Given Dirichlet data for B3 on a closed curve, fit finds coefficients c
minimizing sum_i |sum_k c_k e_k(p_i) - d_i|^2 + reg |c|^2 through an
orthogonal-factorization least-squares solve (never the normal equations).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from .beltrami import (
    BeltramiResiduals,
    ScalarBasisElement,
    SeriesSolution,
    beltrami_residual,
    div_alpha_residual,
    sample_field,
)
from .errors import ConfigError, DimensionMismatch, IllConditioned, NOrderExceeded, OutOfDomain
from .profile import AlphaProfile
from .types import FitDiagnostics
from .vekua import ProbeGrid

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e14


# =============================================================================
# Boundary curves
# =============================================================================


def circle(r: float, center: Sequence[float] = (0.0, 0.0), count: int = 64) -> np.ndarray:
    """count points uniform in angle on a circle, shape (count, 2)."""
    if r <= 0 or count < 3:
        raise ValueError(f"Circle needs r > 0 and count >= 3, got r={r}, count={count}")
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    return np.column_stack([center[0] + r * np.cos(theta), center[1] + r * np.sin(theta)])


def rectangle(lo: Sequence[float], hi: Sequence[float], count: int = 64) -> np.ndarray:
    """count points uniform in arclength on the boundary of an axis-aligned rectangle."""
    (x0, y0), (x1, y1) = lo, hi
    if not (x0 < x1 and y0 < y1) or count < 4:
        raise ValueError(f"Rectangle needs lo < hi and count >= 4, got {lo}, {hi}, {count}")
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])
    lengths = np.linalg.norm(np.diff(corners, axis=0), axis=1)
    edges = np.concatenate([[0.0], np.cumsum(lengths)])
    t = np.linspace(0.0, edges[-1], count, endpoint=False)
    side = np.minimum(np.searchsorted(edges, t, side="right") - 1, 3)
    fraction = ((t - edges[side]) / lengths[side])[:, None]
    return corners[side] + fraction * (corners[side + 1] - corners[side])


# =============================================================================
# Problems
# =============================================================================


@dataclass(frozen=True, eq=False)
class CollocationProblem:
    """Dirichlet data for B3 at boundary points."""

    boundary: np.ndarray
    data: np.ndarray
    n_max: int
    regularization: float = 0.0

    def __post_init__(self) -> None:
        boundary = np.asarray(self.boundary, dtype=float)
        data = np.asarray(self.data, dtype=float).ravel()
        if boundary.ndim != 2 or boundary.shape[1] != 2:
            raise DimensionMismatch(f"Boundary must have shape (m, 2), got {boundary.shape}")
        if data.size != boundary.shape[0]:
            raise DimensionMismatch(
                f"{data.size} data values for {boundary.shape[0]} boundary points"
            )
        if self.n_max < 0:
            raise ValueError(f"n_max must be nonnegative, got {self.n_max}")
        if boundary.shape[0] < 2 * self.n_terms:
            raise DimensionMismatch(
                f"{boundary.shape[0]} boundary points cannot overdetermine "
                f"{self.n_terms} coefficients (need at least {2 * self.n_terms})"
            )
        if self.regularization < 0:
            raise ValueError(f"Regularization must be nonnegative, got {self.regularization}")
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "data", data)

    @property
    def n_terms(self) -> int:
        return 2 * self.n_max + 1


def exp_cos(x: Any, y: Any) -> Any:
    return np.exp(x) * np.cos(y)


def example_b0(x: Any, y: Any) -> Any:
    return np.sqrt(1.0 - np.asarray(y) ** 2) + 0 * np.asarray(x)


TRACE_PRESETS: dict[str, Callable[[Any, Any], Any]] = {
    "exp_cos": exp_cos,
    "example_b0": example_b0,
}


def preset_trace(
    name: str, elements: Sequence[ScalarBasisElement] = ()
) -> Callable[[Any, Any], Any]:
    """A named analytic trace, or the trace of a built element such as "B3[2,u]"."""
    if name in TRACE_PRESETS:
        return TRACE_PRESETS[name]
    for element in elements:
        if element.name == name:
            return element
    raise ConfigError(
        f"Unknown preset trace {name!r}; use one of {sorted(TRACE_PRESETS)} or an element name"
    )


def load_problem(
    spec: dict[str, Any], elements: Sequence[ScalarBasisElement] = ()
) -> CollocationProblem:
    """
    Build a problem from its JSON form::

        {"curve": {"circle": {"r": 0.8, "center": [0, 0], "count": 64}}
                | {"rectangle": {"lo": [x, y], "hi": [x, y], "count": 64}}
                | {"points": [[x, y], ...]},
         "data": [...] | {"preset_trace": name},
         "n_max": 5, "reg": 0.0}
    """
    try:
        curve = spec["curve"]
        if "circle" in curve:
            c = curve["circle"]
            boundary = circle(float(c["r"]), c.get("center", (0.0, 0.0)), int(c.get("count", 64)))
        elif "rectangle" in curve:
            c = curve["rectangle"]
            boundary = rectangle(c["lo"], c["hi"], int(c.get("count", 64)))
        elif "points" in curve:
            boundary = np.asarray(curve["points"], dtype=float)
        else:
            raise ConfigError(f"Unknown curve type {sorted(curve)}")
        data_spec = spec["data"]
        if isinstance(data_spec, dict):
            trace = preset_trace(data_spec["preset_trace"], elements)
            data = np.asarray(trace(boundary[:, 0], boundary[:, 1]), dtype=float)
        else:
            data = np.asarray(data_spec, dtype=float)
        return CollocationProblem(
            boundary=boundary,
            data=data,
            n_max=int(spec["n_max"]),
            regularization=float(spec.get("reg", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Invalid problem specification: {e}") from e


# =============================================================================
# Fitting
# =============================================================================


def collocation_matrix(
    problem: CollocationProblem, elements: Sequence[ScalarBasisElement]
) -> np.ndarray:
    """Columns are the first 2 n_max + 1 elements sampled at the boundary."""
    if problem.n_terms > len(elements):
        raise NOrderExceeded(
            f"Problem needs {problem.n_terms} elements, basis has {len(elements)}"
        )
    window = elements[0].g.positivity
    y = problem.boundary[:, 1]
    if not window.contains(y):
        raise OutOfDomain(
            f"Boundary leaves the positivity window [{window.lo}, {window.hi}]"
        )
    x = problem.boundary[:, 0]
    return np.column_stack([np.asarray(e(x, y)) for e in elements[: problem.n_terms]])


def fit(
    problem: CollocationProblem,
    elements: Sequence[ScalarBasisElement],
    profile: Optional[AlphaProfile] = None,
) -> tuple[SeriesSolution, FitDiagnostics]:
    """
    Least-squares coefficients for the problem's boundary data.

    Without regularization the columns are equilibrated before the solve and
    the condition number of the scaled matrix is checked.

    Raises:
        IllConditioned: If reg = 0 and the scaled condition number exceeds 1e14
        DimensionMismatch, NOrderExceeded, OutOfDomain: For inconsistent inputs
    """
    profile = profile if profile is not None else elements[0].g.alpha
    matrix = collocation_matrix(problem, elements)
    data = problem.data
    reg = problem.regularization

    if reg == 0:
        norms = np.linalg.norm(matrix, axis=0)
        norms[norms == 0] = 1.0
        scaled = matrix / norms
        singular = linalg.svdvals(scaled)
        condition = float(singular[0] / singular[-1]) if singular[-1] > 0 else float("inf")
        if condition > CONDITION_LIMIT:
            raise IllConditioned(condition)
        solution, _, rank, _ = linalg.lstsq(scaled, data)
        coefficients = solution / norms
    else:
        augmented = np.vstack([matrix, np.sqrt(reg) * np.eye(problem.n_terms)])
        rhs = np.concatenate([data, np.zeros(problem.n_terms)])
        singular = linalg.svdvals(augmented)
        condition = float(singular[0] / singular[-1])
        coefficients, _, rank, _ = linalg.lstsq(augmented, rhs)

    misfit = matrix @ coefficients - data
    residual_norm = float(np.linalg.norm(misfit))
    data_norm = float(np.linalg.norm(data))
    diagnostics = FitDiagnostics(
        residual_norm=residual_norm,
        relative_residual=residual_norm / data_norm if data_norm > 0 else residual_norm,
        max_misfit=float(np.max(np.abs(misfit))),
        condition=condition,
        rank=int(rank),
        n_points=int(data.size),
        n_terms=problem.n_terms,
        regularization=reg,
    )
    logger.info(
        "Fitted %d terms to %d points: relative residual %.3e, condition %.3e",
        problem.n_terms,
        data.size,
        diagnostics.relative_residual,
        condition,
    )
    return SeriesSolution(coefficients, elements, profile), diagnostics


@dataclass
class InteriorReport:
    """Field samples of a fitted series and its residuals on a grid."""

    samples: dict[str, np.ndarray] = field(repr=False)
    residuals: BeltramiResiduals
    div_alpha: float


def evaluate_interior(
    solution: SeriesSolution, grid: ProbeGrid, h: Optional[float] = None
) -> InteriorReport:
    """Sample (B1, B2, B3) of the series on the grid and report its residuals."""
    options = {} if h is None else {"h": h}
    field_ = solution.as_field()
    return InteriorReport(
        samples=sample_field(field_, grid),
        residuals=beltrami_residual(field_, solution.profile, grid, **options),
        div_alpha=div_alpha_residual(field_, solution.profile, grid, **options),
    )
