"""
Configuration for planar-beltrami.

Two layers:
- SolverSettings: numerical defaults loaded from environment variables
  (and a .env file if present), shared process-wide
- RunConfig: one reproducible run (profile, expansion point, order, probe
  grid, tolerances, output directory) loaded from a JSON file
"""

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

from dotenv import load_dotenv

from .errors import ConfigError
from .profile import AlphaProfile, GeneratingFunction, generating_function
from .quadrature import Interval
from .vekua import ProbeGrid

# Load .env file if present
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from e


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


@dataclass
class SolverSettings:
    """
    Numerical defaults.

    Attributes:
        quad_tol: Adaptive quadrature tolerance
        table_nodes: Nodes per antiderivative table
        fd_step: Finite-difference step
        fd_step_nested: Outer step of nested second-order differences
        compat_tol: Compatibility tolerance of the antiderivative operator
        window_margin: Inward pull of positivity-window ends, as a fraction
            of the alpha domain width
    """

    quad_tol: float = 1e-10
    table_nodes: int = 2049
    fd_step: float = 1e-3
    fd_step_nested: float = 5e-3
    compat_tol: float = 1e-6
    window_margin: float = 1e-3

    @classmethod
    def from_env(cls) -> "SolverSettings":
        """
        Load settings from environment variables.

        Environment variables:
            BELTRAMI_QUAD_TOL: Quadrature tolerance (default: 1e-10)
            BELTRAMI_TABLE_NODES: Table nodes (default: 2049)
            BELTRAMI_FD_STEP: Finite-difference step (default: 1e-3)
            BELTRAMI_FD_STEP_NESTED: Outer nested step (default: 5e-3)
            BELTRAMI_COMPAT_TOL: Compatibility tolerance (default: 1e-6)
            BELTRAMI_WINDOW_MARGIN: Window margin (default: 1e-3)
        """
        return cls(
            quad_tol=_env_float("BELTRAMI_QUAD_TOL", 1e-10),
            table_nodes=_env_int("BELTRAMI_TABLE_NODES", 2049),
            fd_step=_env_float("BELTRAMI_FD_STEP", 1e-3),
            fd_step_nested=_env_float("BELTRAMI_FD_STEP_NESTED", 5e-3),
            compat_tol=_env_float("BELTRAMI_COMPAT_TOL", 1e-6),
            window_margin=_env_float("BELTRAMI_WINDOW_MARGIN", 1e-3),
        )


# Global settings instance (lazy-loaded)
_settings: Optional[SolverSettings] = None


def get_settings() -> SolverSettings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = SolverSettings.from_env()
    return _settings


def set_settings(settings: Optional[SolverSettings]) -> None:
    """Set the global settings instance (None reloads from the environment)."""
    global _settings
    _settings = settings


# =============================================================================
# Run configuration
# =============================================================================


@dataclass
class Tolerances:
    """Verification thresholds of a run; quad falls back to SolverSettings.quad_tol."""

    quad: Optional[float] = None
    beltrami: float = 1e-5
    div: float = 1e-8
    vekua: float = 1e-6
    second_kind: float = 1e-6
    example: float = 1e-8

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Tolerances":
        unknown = set(data) - {"quad", "beltrami", "div", "vekua", "second_kind", "example"}
        if unknown:
            raise ConfigError(f"Unknown tolerance keys: {sorted(unknown)}")
        values = {k: float(v) for k, v in data.items() if v is not None}
        if any(v <= 0 for v in values.values()):
            raise ConfigError("Tolerances must be positive")
        return cls(**values)

    def to_dict(self) -> dict[str, Any]:
        return {
            "quad": self.quad,
            "beltrami": self.beltrami,
            "div": self.div,
            "vekua": self.vekua,
            "second_kind": self.second_kind,
            "example": self.example,
        }


@dataclass
class ProfileConfig:
    """The profile object: alpha, its domain, (c1, c2) and y_ref."""

    alpha: dict[str, Any]
    domain: Optional[list[float]] = None
    c1: float = 0.0
    c2: float = 1.0
    y_ref: Optional[float] = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProfileConfig":
        if "alpha" not in data or not isinstance(data["alpha"], dict):
            raise ConfigError("Profile config needs an 'alpha' object")
        domain = data.get("domain")
        if domain is not None and len(domain) != 2:
            raise ConfigError(f"Profile domain must be [lo, hi], got {domain}")
        return cls(
            alpha=dict(data["alpha"]),
            domain=None if domain is None else [float(d) for d in domain],
            c1=float(data.get("c1", 0.0)),
            c2=float(data.get("c2", 1.0)),
            y_ref=None if data.get("y_ref") is None else float(data["y_ref"]),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "domain": self.domain,
            "c1": self.c1,
            "c2": self.c2,
            "y_ref": self.y_ref,
        }

    @property
    def constant_k(self) -> Optional[float]:
        """k for the constant preset, otherwise None."""
        if self.alpha.get("preset") == "constant":
            return float(self.alpha.get("k", 1.0))
        return None

    def build_alpha(self) -> AlphaProfile:
        domain = None if self.domain is None else Interval.of(self.domain)
        return AlphaProfile.from_config(self.alpha, domain)


@dataclass
class RunConfig:
    """
    One run of the command-line tool.

    Attributes:
        profile: Profile configuration
        z0: Expansion point [x0, y0]
        n_max: Highest formal power order
        grid: Probe grid {"x": [lo, hi, count], "y": [lo, hi, count]}
        tolerances: Verification thresholds
        output: Output directory
    """

    profile: ProfileConfig
    z0: tuple[float, float] = (0.0, 0.0)
    n_max: int = 3
    grid: dict[str, list[float]] = field(
        default_factory=lambda: {"x": [-0.9, 0.9, 19], "y": [-0.9, 0.9, 19]}
    )
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: str = "out"

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ConfigError(f"n_max must be nonnegative, got {self.n_max}")
        for axis in ("x", "y"):
            spec = self.grid.get(axis)
            if spec is None or len(spec) != 3:
                raise ConfigError(f"grid.{axis} must be [lo, hi, count]")
            lo, hi, count = spec
            if not float(lo) < float(hi) or int(count) < 2:
                raise ConfigError(f"grid.{axis} needs lo < hi and count >= 2, got {spec}")

    @classmethod
    def example(cls) -> "RunConfig":
        """The inverse square-root profile with c1 = 0, c2 = 1 around z0 = 0."""
        return cls(
            profile=ProfileConfig(
                alpha={"preset": "example_inv_sqrt"},
                domain=[-0.95, 0.95],
                c1=0.0,
                c2=1.0,
                y_ref=0.0,
            )
        )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        """Create a RunConfig from a dictionary."""
        try:
            z0 = data.get("z0", [0.0, 0.0])
            return cls(
                profile=ProfileConfig.from_dict(data["profile"]),
                z0=(float(z0[0]), float(z0[1])),
                n_max=int(data.get("n_max", 3)),
                grid={k: list(v) for k, v in data.get("grid", cls.example().grid).items()},
                tolerances=Tolerances.from_dict(data.get("tolerances", {})),
                output=str(data.get("output", "out")),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile.to_dict(),
            "z0": list(self.z0),
            "n_max": self.n_max,
            "grid": self.grid,
            "tolerances": self.tolerances.to_dict(),
            "output": self.output,
        }

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form; the output directory is not part of it."""
        content = {k: v for k, v in self.to_dict().items() if k != "output"}
        canonical = json.dumps(content, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_overrides(
        self,
        n_max: Optional[int] = None,
        tol: Optional[float] = None,
        output: Optional[str] = None,
    ) -> "RunConfig":
        tolerances = self.tolerances if tol is None else replace(self.tolerances, quad=tol)
        return replace(
            self,
            n_max=self.n_max if n_max is None else n_max,
            tolerances=tolerances,
            output=self.output if output is None else output,
        )

    @property
    def z0_complex(self) -> complex:
        return complex(self.z0[0], self.z0[1])

    def probe_grid(self) -> ProbeGrid:
        return ProbeGrid.from_config(self.grid)

    def quad_tol(self, settings: Optional[SolverSettings] = None) -> float:
        settings = settings or get_settings()
        return self.tolerances.quad if self.tolerances.quad is not None else settings.quad_tol

    def generating_function(self, settings: Optional[SolverSettings] = None) -> GeneratingFunction:
        """Build alpha and f0, with the positivity window grown from Im z0."""
        settings = settings or get_settings()
        return generating_function(
            self.profile.build_alpha(),
            self.profile.c1,
            self.profile.c2,
            y_ref=self.profile.y_ref,
            anchor=self.z0[1],
            tol=self.quad_tol(settings),
            n_nodes=settings.table_nodes,
            margin=settings.window_margin,
        )
