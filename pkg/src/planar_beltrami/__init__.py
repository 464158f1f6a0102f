"""
planar-beltrami - exact solutions of rot B + alpha(y) B = 0.

This package provides:
- Profiles alpha(y) from presets, text expressions or tabulated samples
- The generating function f0 and its positivity window
- Formal powers of the associated Vekua equation, built by recursive quadrature
- The complete system of scalar solutions B3 and the fields (B1, B2, B3)
- Residual operators for every equation in the chain
- Least-squares boundary collocation with the basis
- A command-line tool writing reproducible CSV/JSON outputs

Quick Start:
    >>> from planar_beltrami import AlphaProfile, b3_basis, generating_function
    >>>
    >>> # alpha = 1/sqrt(1 - y^2) with f0 = (1 - y^2)^(3/4)
    >>> alpha = AlphaProfile.inverse_sqrt()
    >>> g = generating_function(alpha, c1=0.0, c2=1.0, y_ref=0.0)
    >>>
    >>> # B3[0,u], B3[1,u], B3[1,v], ... up to n = 3 around z0 = 0
    >>> elements = b3_basis(alpha, g, 0j, 3)
    >>> elements[1](0.5, 0.0)
    0.5
"""

from planar_beltrami.beltrami import (
    BeltramiFieldElement,
    BeltramiResiduals,
    Flavor,
    ScalarBasisElement,
    SeriesSolution,
    b3_basis,
    b3_equation_residual,
    beltrami_residual,
    div_alpha_residual,
    field_from_scalar,
    schrodinger_residual,
    series_eval,
    series_field,
    transfer_context,
)
from planar_beltrami.bvp import CollocationProblem, circle, fit, load_problem, rectangle
from planar_beltrami.config import (
    RunConfig,
    SolverSettings,
    Tolerances,
    get_settings,
    set_settings,
)
from planar_beltrami.errors import (
    BeltramiError,
    CompatibilityError,
    ConfigError,
    DimensionMismatch,
    DomainError,
    IllConditioned,
    NoPositivityWindow,
    NonConvergence,
    NonFiniteSample,
    NOrderExceeded,
    OutOfDomain,
    ParseError,
    QuadratureError,
    ResidualError,
)
from planar_beltrami.formal_powers import (
    FormalPowerBasis,
    build_recursion,
    first_kind,
    formal_basis,
    formal_power,
    normalization_ratio,
    second_kind_pair,
)
from planar_beltrami.profile import (
    AlphaProfile,
    ConductivityPair,
    GeneratingFunction,
    antiderivative_A,
    generating_function,
    parse_alpha,
    schrodinger_potential,
    vekua_coefficient,
)
from planar_beltrami.quadrature import (
    AntiderivativeTable,
    Interval,
    cumulative,
    integrate,
    table_deriv,
    table_eval,
)
from planar_beltrami.schema import SCHEMA_VERSION, TABLES, get_field_names, get_table_schema
from planar_beltrami.types import CheckResult, ElementSummary, FitDiagnostics, ResidualReport
from planar_beltrami.vekua import (
    ComplexField,
    ProbeGrid,
    TransferContext,
    abar,
    compute_q1,
    transfer_u_to_v,
    transfer_v_to_u,
)

__version__ = "0.1.0"

__all__ = [
    # Quadrature
    "Interval",
    "AntiderivativeTable",
    "integrate",
    "cumulative",
    "table_eval",
    "table_deriv",
    # Profile
    "AlphaProfile",
    "GeneratingFunction",
    "ConductivityPair",
    "parse_alpha",
    "antiderivative_A",
    "generating_function",
    "schrodinger_potential",
    "vekua_coefficient",
    # Formal powers
    "FormalPowerBasis",
    "build_recursion",
    "formal_basis",
    "formal_power",
    "first_kind",
    "second_kind_pair",
    "normalization_ratio",
    # Vekua
    "ProbeGrid",
    "ComplexField",
    "TransferContext",
    "abar",
    "compute_q1",
    "transfer_u_to_v",
    "transfer_v_to_u",
    # Beltrami
    "Flavor",
    "ScalarBasisElement",
    "BeltramiFieldElement",
    "BeltramiResiduals",
    "SeriesSolution",
    "b3_basis",
    "field_from_scalar",
    "beltrami_residual",
    "div_alpha_residual",
    "b3_equation_residual",
    "schrodinger_residual",
    "series_eval",
    "series_field",
    "transfer_context",
    # BVP
    "CollocationProblem",
    "circle",
    "rectangle",
    "load_problem",
    "fit",
    # Config
    "SolverSettings",
    "RunConfig",
    "Tolerances",
    "get_settings",
    "set_settings",
    # Schema
    "SCHEMA_VERSION",
    "TABLES",
    "get_table_schema",
    "get_field_names",
    # Types
    "ElementSummary",
    "CheckResult",
    "ResidualReport",
    "FitDiagnostics",
    # Errors
    "BeltramiError",
    "ConfigError",
    "QuadratureError",
    "NonConvergence",
    "NonFiniteSample",
    "OutOfDomain",
    "NOrderExceeded",
    "ParseError",
    "DomainError",
    "NoPositivityWindow",
    "CompatibilityError",
    "ResidualError",
    "IllConditioned",
    "DimensionMismatch",
]
