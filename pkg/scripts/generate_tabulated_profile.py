#!/usr/bin/env python3
"""
Generate a Tabulated-Profile Run

This script samples alpha(y) from a text expression on a uniform grid and
writes a run configuration whose profile is the tabulated samples, plus a
matching collocation problem. Both files can be passed straight to the
command-line tool.

Usage:
    python scripts/generate_tabulated_profile.py --expression "1 + y^2/4" --output runs/
    planar-beltrami verify --config runs/run.json
    planar-beltrami bvp --config runs/run.json --problem runs/problem.json
"""

import argparse
import json
from pathlib import Path
from typing import Any

import numpy as np

from planar_beltrami.profile import parse_alpha
from planar_beltrami.quadrature import Interval


def sample_profile(expression: str, lo: float, hi: float, samples: int) -> dict[str, Any]:
    """
    Sample alpha on [lo, hi].

    The expression is parsed and checked on the whole interval first, so
    the tabulated profile inherits its positivity.
    """
    profile = parse_alpha(expression, Interval(lo, hi))
    y = np.linspace(lo, hi, samples)
    alpha = np.asarray(profile(y), dtype=float)
    return {"y": [float(v) for v in y], "alpha": [float(v) for v in alpha]}


def build_run(table: dict[str, Any], n_max: int, output: str) -> dict[str, Any]:
    """Run configuration centred on the middle of the tabulated range."""
    lo, hi = table["y"][0], table["y"][-1]
    mid = 0.5 * (lo + hi)
    inner = 0.4 * (hi - lo)
    return {
        "profile": {
            "alpha": {"tabulated": table},
            "c1": 0.0,
            "c2": 1.0,
            "y_ref": mid,
        },
        "z0": [0.0, mid],
        "n_max": n_max,
        "grid": {"x": [-inner, inner, 11], "y": [mid - inner, mid + inner, 11]},
        "output": output,
    }


def build_problem(run: dict[str, Any], n_max: int) -> dict[str, Any]:
    """Circle problem inside the probe grid with the exp(x) cos(y) trace."""
    x_lo, x_hi, _ = run["grid"]["x"]
    y_lo, y_hi, _ = run["grid"]["y"]
    radius = 0.45 * min(x_hi - x_lo, y_hi - y_lo)
    return {
        "curve": {"circle": {"r": radius, "center": run["z0"], "count": 8 * n_max + 8}},
        "data": {"preset_trace": "exp_cos"},
        "n_max": n_max,
        "reg": 0.0,
    }


def write_json(payload: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"  ✓ Wrote {path}")


def main():
    parser = argparse.ArgumentParser(description="Generate a tabulated-profile run configuration")
    parser.add_argument(
        "--expression",
        "-e",
        default="1 + y^2/4",
        help="alpha(y) to sample (default: 1 + y^2/4)",
    )
    parser.add_argument("--lo", type=float, default=-1.0, help="Lower end of the range (default: -1)")
    parser.add_argument("--hi", type=float, default=1.0, help="Upper end of the range (default: 1)")
    parser.add_argument(
        "--samples",
        type=int,
        default=401,
        help="Number of samples (default: 401)",
    )
    parser.add_argument("--nmax", type=int, default=4, help="Basis order (default: 4)")
    parser.add_argument(
        "--output",
        "-o",
        default="runs",
        help="Output directory for the JSON files (default: runs/)",
    )
    args = parser.parse_args()

    output_path = Path(args.output)

    print("Generating tabulated profile...")
    print(f"  alpha(y) = {args.expression} on [{args.lo}, {args.hi}]")
    print(f"  Samples: {args.samples}")
    print()

    table = sample_profile(args.expression, args.lo, args.hi, args.samples)
    run = build_run(table, args.nmax, str(output_path / "out"))
    write_json(run, output_path / "run.json")
    write_json(build_problem(run, args.nmax), output_path / "problem.json")

    print("\n✓ Run generation complete!")
    print("\nTo verify the basis and solve the problem:")
    print(f"  planar-beltrami verify --config {output_path / 'run.json'}")
    print(
        f"  planar-beltrami bvp --config {output_path / 'run.json'} "
        f"--problem {output_path / 'problem.json'}"
    )


if __name__ == "__main__":
    main()
