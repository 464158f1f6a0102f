#!/usr/bin/env python3
"""
Command-line interface for planar-beltrami.

Usage:
    planar-beltrami --help
    planar-beltrami basis --config run.json --out results/
    planar-beltrami verify --config run.json --nmax 10
    planar-beltrami verify --config run.json --fields results/fields
    planar-beltrami bvp --config run.json --problem problem.json
    planar-beltrami example --out results/

Exit codes: 0 success, 1 verification failed, 2 configuration error,
3 numerical or unexpected failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np
from scipy.stats import qmc

from planar_beltrami.beltrami import (
    BeltramiFieldElement,
    ScalarBasisElement,
    b3_basis,
    beltrami_residual,
    div_alpha_residual,
    field_from_scalar,
    field_scale,
    sample_field,
)
from planar_beltrami.bvp import evaluate_interior, fit, load_problem
from planar_beltrami.closed_forms import (
    constant_alpha_elements,
    example_field,
    example_formal_power,
)
from planar_beltrami.config import RunConfig, SolverSettings, get_settings
from planar_beltrami.errors import (
    BeltramiError,
    ConfigError,
    DomainError,
    NoPositivityWindow,
    ParseError,
)
from planar_beltrami.export import build_meta, read_table, write_json, write_table
from planar_beltrami.profile import AlphaProfile, GeneratingFunction, schrodinger_potential
from planar_beltrami.types import ElementSummary, ResidualReport
from planar_beltrami.vekua import ProbeGrid, second_kind_residual, vekua_residual

logger = logging.getLogger("planar_beltrami.cli")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Maximum relative deviation tolerated when re-reading exported field CSVs
CSV_MATCH_TOL = 1e-10


# =============================================================================
# Shared setup
# =============================================================================


class RunContext:
    """Everything a subcommand needs: config, settings, f0, basis and grid."""

    def __init__(self, config: RunConfig, settings: SolverSettings, n_max: Optional[int] = None):
        self.config = config
        self.settings = settings
        self.g: GeneratingFunction = config.generating_function(settings)
        self.grid: ProbeGrid = config.probe_grid()
        window = self.g.positivity
        if not window.contains_interval(self.grid.y_range):
            raise ConfigError(
                f"Grid y-range [{self.grid.y_range.lo}, {self.grid.y_range.hi}] is not inside "
                f"the positivity window [{window.lo:.12g}, {window.hi:.12g}]"
            )
        self.elements: list[ScalarBasisElement] = b3_basis(
            self.g.alpha,
            self.g,
            config.z0_complex,
            config.n_max if n_max is None else n_max,
            tol=config.quad_tol(settings),
            n_nodes=settings.table_nodes,
        )
        self.out = Path(config.output)

    @property
    def alpha(self) -> AlphaProfile:
        return self.g.alpha

    def meta(self, **extra: Any) -> dict[str, Any]:
        tolerances = self.config.tolerances.to_dict()
        tolerances["quad"] = self.config.quad_tol(self.settings)
        return build_meta(self.config.config_hash(), tolerances, **extra)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Run config from --config (or the built-in example) with CLI overrides."""
    config = RunConfig.from_file(args.config) if args.config else RunConfig.example()
    if args.nmax is not None and args.nmax < 0:
        raise ConfigError(f"--nmax must be nonnegative, got {args.nmax}")
    if args.tol is not None and args.tol <= 0:
        raise ConfigError(f"--tol must be positive, got {args.tol}")
    return config.with_overrides(n_max=args.nmax, tol=args.tol, output=args.out)


def field_csv_name(element: ScalarBasisElement) -> str:
    return f"B3_{element.n}_{element.flavor.value}.csv"


def element_residuals(
    ctx: RunContext, element: ScalarBasisElement
) -> tuple[BeltramiFieldElement, dict[str, float]]:
    """Residuals of one element, each divided by max(1, scale of the checked quantity)."""
    h = ctx.settings.fd_step
    field = field_from_scalar(element, ctx.alpha)
    scale = max(1.0, field_scale(field, ctx.alpha, ctx.grid))
    triple = beltrami_residual(field, ctx.alpha, ctx.grid, h)
    X, Y = ctx.grid.points
    W = element.first_kind_field()
    w_scale = max(1.0, float(np.max(np.abs(W(X, Y)))))
    omega = element.second_kind_field()
    o_scale = max(1.0, float(np.max(np.abs(omega(X, Y)))))
    residuals = {
        "beltrami_first": triple.first / scale,
        "beltrami_second": triple.second / scale,
        "beltrami_third": triple.third / scale,
        "div_alpha": div_alpha_residual(field, ctx.alpha, ctx.grid, h) / scale,
        "vekua": vekua_residual(
            W,
            lambda x, y: ctx.g.f0(y) + 0 * x,
            ctx.grid,
            h,
            f_grad=lambda x, y: (0 * x, ctx.g.f0_deriv(y) + 0 * x),
        )
        / w_scale,
        "second_kind": second_kind_residual(omega, ctx.g, ctx.grid, h) / o_scale,
    }
    return field, residuals


def thresholds(config: RunConfig) -> dict[str, float]:
    tol = config.tolerances
    return {
        "beltrami_first": tol.beltrami,
        "beltrami_second": tol.beltrami,
        "beltrami_third": tol.beltrami,
        "div_alpha": tol.div,
        "vekua": tol.vekua,
        "second_kind": tol.second_kind,
    }


# =============================================================================
# Subcommands
# =============================================================================


def constant_alpha_check(ctx: RunContext) -> dict[str, Any]:
    """Deviations of f0, A, r and the first three elements from constant-alpha closed forms."""
    k = ctx.config.profile.constant_k
    forms = constant_alpha_elements(
        k, ctx.g.c1, ctx.g.c2, ctx.g.y_ref, ctx.config.z0_complex
    )
    X, Y = ctx.grid.points
    y = ctx.grid.y
    deviations = {
        "A": float(np.max(np.abs(ctx.g.A(y) - forms.A(y)))),
        "f0": float(np.max(np.abs(ctx.g.f0(y) - forms.f0(y)))),
        "r": float(np.max(np.abs(schrodinger_potential(ctx.alpha)(y) - forms.potential(y)))),
    }
    by_name = {e.name: e for e in ctx.elements}
    for name, closed in forms.elements().items():
        if name in by_name:
            deviations[name] = float(np.max(np.abs(by_name[name](X, Y) - closed(X, Y))))
    return {"k": k, "deviations": deviations}


def cmd_basis(args: argparse.Namespace) -> int:
    """Build the basis, export every field and write the manifest."""
    config = load_config(args)
    ctx = RunContext(config, get_settings())
    meta = ctx.meta()
    summaries = []
    for element in ctx.elements:
        field, residuals = element_residuals(ctx, element)
        csv_name = field_csv_name(element)
        write_table(
            ctx.out / "fields" / csv_name,
            "field",
            sample_field(field, ctx.grid),
            {**meta, "element": element.name},
        )
        summaries.append(
            ElementSummary(
                name=element.name,
                index=element.index,
                n=element.n,
                flavor=element.flavor.value,
                csv=f"fields/{csv_name}",
                residuals=residuals,
            )
        )

    manifest = {
        "config": config.to_dict(),
        "positivity": ctx.g.positivity.to_list(),
        "sign": ctx.g.sign,
        "elements": [s.to_dict() for s in summaries],
    }
    write_json(ctx.out / "basis.json", manifest, meta)

    if config.profile.constant_k is not None:
        write_json(ctx.out / "closed_form_check.json", constant_alpha_check(ctx), meta)

    print(f"Basis: {len(summaries)} elements (n_max={config.n_max}) written to {ctx.out}")
    for s in summaries:
        print(f"  {s.name:<10} worst residual {s.worst_residual:.3e}")
    return EXIT_OK


def _compare_fields(ctx: RunContext, fields_dir: Path, report: ResidualReport) -> None:
    """Re-read exported CSVs and compare them with freshly evaluated fields."""
    for element in ctx.elements:
        path = fields_dir / field_csv_name(element)
        if not path.exists():
            report.add("csv_present", float("inf"), 1.0, element.name)
            continue
        table = read_table(path, "field")
        x = table.column("x").to_numpy()
        y = table.column("y").to_numpy()
        field = field_from_scalar(element, ctx.alpha)
        expected = field.components(x, y)
        deviation = 0.0
        for column, values in zip(("B1", "B2", "B3"), expected):
            stored = table.column(column).to_numpy()
            scale = max(1.0, float(np.max(np.abs(values))))
            deviation = max(deviation, float(np.max(np.abs(stored - values))) / scale)
        report.add("csv_match", deviation, CSV_MATCH_TOL, element.name)


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the residual suite; exit 1 naming the first failing check."""
    config = load_config(args)
    ctx = RunContext(config, get_settings())
    limits = thresholds(config)
    report = ResidualReport()
    for element in ctx.elements:
        _, residuals = element_residuals(ctx, element)
        for name, value in residuals.items():
            report.add(name, value, limits[name], element.name)
        logger.debug("Verified %s", element.name)

    if args.fields:
        _compare_fields(ctx, Path(args.fields), report)

    top = ctx.elements[-1]
    top_field = field_from_scalar(top, ctx.alpha)
    triple = beltrami_residual(top_field, ctx.alpha, ctx.grid, ctx.settings.fd_step)
    report.notes["top_element"] = top.name
    report.notes["top_third_residual_normalized"] = triple.third / max(
        field_scale(top_field, ctx.alpha, ctx.grid), np.finfo(float).tiny
    )

    meta = ctx.meta()
    write_json(ctx.out / "verify.json", report.to_dict(), meta)
    write_table(
        ctx.out / "residuals.csv",
        "residuals",
        {
            "element": [c.element for c in report.checks],
            "check": [c.name for c in report.checks],
            "value": [c.value for c in report.checks],
            "threshold": [c.threshold for c in report.checks],
            "passed": [c.passed for c in report.checks],
        },
        meta,
    )

    failure = report.first_failure
    if failure is not None:
        print(
            f"FAILED: {failure.name} for {failure.element}: "
            f"{failure.value:.3e} >= {failure.threshold:.1e}",
            file=sys.stderr,
        )
        return EXIT_VERIFY_FAILED
    print(f"All {len(report.checks)} checks passed for {len(ctx.elements)} elements")
    print(
        f"  {top.name}: normalized third residual "
        f"{report.notes['top_third_residual_normalized']:.3e}"
    )
    return EXIT_OK


def cmd_bvp(args: argparse.Namespace) -> int:
    """Fit boundary data with the basis and evaluate the series inside."""
    config = load_config(args)
    if not args.problem:
        raise ConfigError("bvp needs --problem PATH")
    try:
        spec = json.loads(Path(args.problem).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read problem file {args.problem}: {e}") from e
    if "n_max" not in spec:
        raise ConfigError("Problem file needs n_max")
    ctx = RunContext(config, get_settings(), n_max=max(config.n_max, int(spec["n_max"])))
    problem = load_problem(spec, ctx.elements)
    solution, diagnostics = fit(problem, ctx.elements, ctx.alpha)
    interior = evaluate_interior(solution, ctx.grid, ctx.settings.fd_step)

    meta = ctx.meta()
    used = ctx.elements[: problem.n_terms]
    write_json(
        ctx.out / "coefficients.json",
        {
            "pairs": solution.pairs(),
            "coefficients": {e.name: float(c) for e, c in zip(used, solution.coefficients)},
            "diagnostics": diagnostics.to_dict(),
            "interior": {
                "beltrami": list(interior.residuals),
                "div_alpha": interior.div_alpha,
            },
        },
        meta,
    )
    write_table(
        ctx.out / "coefficients.csv",
        "coefficients",
        {
            "index": [e.index for e in used],
            "name": [e.name for e in used],
            "n": [e.n for e in used],
            "flavor": [e.flavor.value for e in used],
            "coefficient": solution.coefficients,
        },
        meta,
    )
    write_table(ctx.out / "interior.csv", "field", interior.samples, meta)
    print(
        f"Fitted {problem.n_terms} terms: relative boundary residual "
        f"{diagnostics.relative_residual:.3e}, condition {diagnostics.condition:.3e}"
    )
    return EXIT_OK


def disk_points(count: int = 200, radius: float = 0.9) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic quasi-random points in the disk |z| <= radius."""
    sample = qmc.Halton(d=2, scramble=False).random(count)
    r = radius * np.sqrt(sample[:, 0])
    theta = 2.0 * np.pi * sample[:, 1]
    return r * np.cos(theta), r * np.sin(theta)


def cmd_example(args: argparse.Namespace) -> int:
    """Compare the numeric construction with the closed forms for alpha = 1/sqrt(1-y^2)."""
    config = RunConfig.example().with_overrides(n_max=3, tol=args.tol, output=args.out)
    settings = get_settings()
    ctx = RunContext(config, settings)
    x, y = disk_points()
    limit = config.tolerances.example
    rows: list[tuple[str, float, float]] = []

    powers = ctx.elements[0].powers
    for n in range(1, 4):
        for label, a in (("1", 1.0 + 0j), ("i", 1j)):
            numeric = powers.evaluate(a, n, x, y)
            closed = example_formal_power(n, a, x, y)
            threshold = 1e-10 if (n, label) == (1, "i") else limit
            rows.append((f"Z[{n},{label}]", float(np.max(np.abs(numeric - closed))), threshold))

    for element in ctx.elements:
        field = field_from_scalar(element, ctx.alpha)
        numeric = field.components(x, y)
        closed = example_field(element.index, x, y)
        deviation = max(float(np.max(np.abs(np.asarray(a) - b))) for a, b in zip(numeric, closed))
        rows.append((f"B{element.index} ({element.name})", deviation, limit))

    meta = ctx.meta(points=len(x))
    write_table(
        ctx.out / "example.csv",
        "example",
        {
            "quantity": [r[0] for r in rows],
            "max_deviation": [r[1] for r in rows],
            "threshold": [r[2] for r in rows],
        },
        meta,
    )
    write_json(
        ctx.out / "example.json",
        {"comparisons": [{"quantity": q, "max_deviation": d, "threshold": t} for q, d, t in rows]},
        meta,
    )

    failed = [r for r in rows if not r[1] < r[2]]
    for quantity, deviation, threshold in rows:
        status = "ok" if deviation < threshold else "FAIL"
        print(f"  {quantity:<18} {deviation:.3e}  (< {threshold:.0e}) {status}")
    if failed:
        print(f"FAILED: {failed[0][0]} deviates by {failed[0][1]:.3e}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# =============================================================================
# Entry point
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration JSON (default: built-in example)")
    common.add_argument("--out", help="Output directory (overrides the config)")
    common.add_argument("--nmax", type=int, help="Highest formal power order (overrides the config)")
    common.add_argument("--tol", type=float, help="Quadrature tolerance (overrides the config)")
    common.add_argument("--verbose", "-v", action="store_true", help="Log debug messages")
    common.add_argument("--debug", action="store_true", help="Re-raise errors with a traceback")

    parser = argparse.ArgumentParser(
        prog="planar-beltrami",
        description="Exact solutions of rot B + alpha(y) B = 0 through formal powers",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Build the basis of the built-in example and export its fields
  planar-beltrami basis --out results/

  # Verify residuals up to n = 10
  planar-beltrami verify --config run.json --nmax 10

  # Check exported CSVs against a fresh evaluation
  planar-beltrami verify --config run.json --fields results/fields

  # Boundary collocation
  planar-beltrami bvp --config run.json --problem problem.json

  # Closed-form comparison for alpha = 1/sqrt(1-y^2)
  planar-beltrami example --out results/
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    basis_parser = subparsers.add_parser(
        "basis", parents=[common], help="Build the basis and export fields"
    )
    basis_parser.set_defaults(func=cmd_basis)

    verify_parser = subparsers.add_parser(
        "verify", parents=[common], help="Run the residual suite"
    )
    verify_parser.add_argument("--fields", help="Directory of exported field CSVs to re-check")
    verify_parser.set_defaults(func=cmd_verify)

    bvp_parser = subparsers.add_parser("bvp", parents=[common], help="Solve a collocation problem")
    bvp_parser.add_argument("--problem", help="Problem specification JSON")
    bvp_parser.set_defaults(func=cmd_bvp)

    example_parser = subparsers.add_parser(
        "example", parents=[common], help="Closed-form comparison for alpha = 1/sqrt(1-y^2)"
    )
    example_parser.set_defaults(func=cmd_example)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_VERIFY_FAILED

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130
    except (ConfigError, ParseError, DomainError, NoPositivityWindow) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        if args.debug:
            raise
        return EXIT_CONFIG
    except BeltramiError as e:
        print(f"Numerical error: {e}", file=sys.stderr)
        if args.debug:
            raise
        return EXIT_NUMERICAL
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        if args.debug:
            raise
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
