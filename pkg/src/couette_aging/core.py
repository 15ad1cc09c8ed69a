"""Domain types, parameter validation and initial-state construction."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


class ValidationError(ValueError):
    """Raised when a parameter, config field or initial-condition spec is invalid."""


class DivergenceError(ArithmeticError):
    """Raised when a non-finite value shows up during time stepping."""

    def __init__(self, message: str, stage: str | None = None, t: float | None = None):
        super().__init__(message)
        self.stage = stage
        self.t = t


@dataclass(frozen=True)
class Parameters:
    """The six positive model coefficients.

    ``lam`` is the relaxation time (``lambda`` in config files) and ``g_mod``
    the elastic modulus G.
    """

    rho: float = 0.001
    eta: float = 1.0
    lam: float = 0.5
    g_mod: float = 1.0
    xi: float = 1.0
    nu: float = 1.0

    # config-file key -> attribute
    KEYS = {"rho": "rho", "eta": "eta", "lambda": "lam", "g_mod": "g_mod", "xi": "xi", "nu": "nu"}

    def __post_init__(self):
        validate_parameters(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str = "params") -> "Parameters":
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise ValidationError(f"{path}: unknown key(s) {sorted(unknown)}")
        kwargs = {cls.KEYS[k]: _as_float(v, f"{path}.{k}") for k, v in data.items()}
        return cls(**kwargs)

    def to_dict(self) -> dict[str, float]:
        return {k: getattr(self, attr) for k, attr in self.KEYS.items()}

    def replace(self, **changes) -> "Parameters":
        return dataclasses.replace(self, **changes)


def validate_parameters(p: Parameters) -> Parameters:
    """Return ``p`` unchanged if every coefficient is strictly positive and finite."""
    for key, attr in Parameters.KEYS.items():
        value = getattr(p, attr)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValidationError(f"{key} must be positive (got {value!r})")
    return p


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet data: u(0) = 0 and u(1) = a."""

    a: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValidationError(f"a must be non-negative (got {self.a!r})")

    @property
    def homogeneous(self) -> bool:
        return self.a == 0.0


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of [0, 1] with ``n_cells`` elements."""

    n_cells: int

    def __post_init__(self):
        if not isinstance(self.n_cells, (int, np.integer)) or self.n_cells < 2:
            raise ValidationError(f"n_cells must be an integer >= 2 (got {self.n_cells!r})")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.h

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.h


@dataclass
class State:
    """Discrete fields at time ``t``: nodal P1 velocity, cellwise P0 stress and fluidity."""

    t: float
    u: np.ndarray
    tau: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        if self.u.ndim != 1 or self.tau.shape != self.f.shape or self.u.size != self.tau.size + 1:
            raise ValidationError(
                f"inconsistent field sizes: u={self.u.shape}, tau={self.tau.shape}, f={self.f.shape}"
            )

    @property
    def grid(self) -> Grid:
        return Grid(self.tau.size)

    def copy(self) -> "State":
        return State(self.t, self.u.copy(), self.tau.copy(), self.f.copy())


IC_KINDS = ("homogeneous-sine", "beta-support", "nonhomogeneous-sine", "constant", "zero-fluidity")


@dataclass(frozen=True)
class InitialConditionSpec:
    """Choice of initial profile.

    ``beta`` is used by ``beta-support``; ``u_slope``, ``tau0`` and ``f0`` by
    ``constant``. The sine presets take optional overrides: ``u_amplitude``,
    ``tau_amplitude`` and ``f_amplitude`` scale the oscillating parts and
    ``tau_mean`` shifts the stress profile.
    """

    kind: str = "homogeneous-sine"
    beta: float | None = None
    u_slope: float = 0.0
    tau0: float = 0.0
    f0: float = 0.0
    u_amplitude: float | None = None
    tau_amplitude: float | None = None
    f_amplitude: float | None = None
    tau_mean: float | None = None

    def __post_init__(self):
        if self.kind not in IC_KINDS:
            raise ValidationError(f"ic.kind must be one of {IC_KINDS} (got {self.kind!r})")
        if self.kind == "beta-support":
            if self.beta is None or not (0.0 < self.beta <= 1.0):
                raise ValidationError(f"ic.beta must lie in (0, 1] (got {self.beta!r})")
        if self.kind == "constant" and self.f0 < 0:
            raise ValidationError(f"ic.f0 must be non-negative (got {self.f0!r})")
        if self.f_amplitude is not None and self.f_amplitude < 0:
            raise ValidationError(f"ic.f_amplitude must be non-negative (got {self.f_amplitude!r})")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str = "ic") -> "InitialConditionSpec":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValidationError(f"{path}: unknown key(s) {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            kwargs[key] = value if key == "kind" else _as_float(value, f"{path}.{key}")
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


def build_initial_state(spec: InitialConditionSpec, grid: Grid, bc: BoundaryCondition) -> State:
    """Sample the initial profile: u at nodes, tau and f at cell midpoints.

    Velocity endpoint values are overwritten with the Dirichlet data.
    """
    y, ym = grid.nodes, grid.midpoints
    two_pi = 2.0 * np.pi

    def amp(value, default):
        return default if value is None else value

    if spec.kind in ("homogeneous-sine", "beta-support", "zero-fluidity"):
        u = amp(spec.u_amplitude, 0.002) * np.sin(two_pi * y)
        tau = amp(spec.tau_mean, 0.0) + amp(spec.tau_amplitude, 0.5) * np.sin(two_pi * ym)
        if spec.kind == "homogeneous-sine":
            f = amp(spec.f_amplitude, 0.25) * (1.0 - np.cos(two_pi * ym))
        elif spec.kind == "beta-support":
            beta = spec.beta
            f = np.where(ym < beta, amp(spec.f_amplitude, 0.5) * np.sin(np.pi * np.minimum(ym / beta, 1.0)), 0.0)
        else:
            f = np.zeros_like(ym)
    elif spec.kind == "nonhomogeneous-sine":
        if bc.a <= 0:
            raise ValidationError("nonhomogeneous-sine requires a > 0")
        u = bc.a * np.sin(0.5 * np.pi * y) ** 2
        tau = amp(spec.tau_mean, 0.5) + amp(spec.tau_amplitude, 0.25) * np.sin(two_pi * ym)
        f = 0.5 + amp(spec.f_amplitude, 0.25) * np.sin(two_pi * ym)
    else:  # constant
        u = spec.u_slope * y
        tau = np.full(grid.n_cells, spec.tau0)
        f = np.full(grid.n_cells, spec.f0)

    u = np.array(u, dtype=float)
    u[0], u[-1] = 0.0, bc.a
    # round-off in the sine presets must not produce -0.0 or tiny negatives
    f = np.maximum(np.asarray(f, dtype=float), 0.0)
    return State(0.0, u, np.asarray(tau, dtype=float), f)


NORM_MODES = ("absolute", "relative-to-steady")


@dataclass(frozen=True)
class RunConfig:
    params: Parameters = field(default_factory=Parameters)
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)
    n_cells: int = 200
    dt: float = 0.01
    t_end: float = 2000.0
    record_every: int = 100
    ic: InitialConditionSpec = field(default_factory=InitialConditionSpec)
    norm_mode: str = "absolute"
    output_path: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be positive (got {self.dt!r})")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValidationError(f"t_end must be non-negative (got {self.t_end!r})")
        if not isinstance(self.record_every, (int, np.integer)) or self.record_every < 1:
            raise ValidationError(f"record_every must be an integer >= 1 (got {self.record_every!r})")
        if self.norm_mode not in NORM_MODES:
            raise ValidationError(f"norm_mode must be one of {NORM_MODES} (got {self.norm_mode!r})")
        Grid(self.n_cells)
        if self.ic.kind == "nonhomogeneous-sine" and self.bc.a <= 0:
            raise ValidationError("ic.kind nonhomogeneous-sine requires bc.a > 0")

    @property
    def grid(self) -> Grid:
        return Grid(self.n_cells)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "bc": {"a": self.bc.a},
            "n_cells": self.n_cells,
            "dt": self.dt,
            "t_end": self.t_end,
            "record_every": self.record_every,
            "ic": self.ic.to_dict(),
            "norm_mode": self.norm_mode,
            "output_path": self.output_path,
        }


SCALES = {
    "desk": {"n_cells": 200, "dt": 0.01, "t_end": 2000.0},
    "paper": {"n_cells": 500, "dt": 0.005, "t_end": 10000.0},
}

CONFIG_KEYS = ("params", "bc", "n_cells", "dt", "t_end", "record_every", "ic", "norm_mode", "output_path")


def config_from_dict(data: Mapping[str, Any], scale: str = "desk") -> RunConfig:
    """Build a validated RunConfig from a parsed JSON document.

    Missing fields take the defaults of ``scale``; unknown keys are rejected.
    """
    if not isinstance(data, Mapping):
        raise ValidationError("config: top-level JSON value must be an object")
    if scale not in SCALES:
        raise ValidationError(f"scale must be one of {sorted(SCALES)} (got {scale!r})")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"config: unknown key(s) {sorted(unknown)}")

    kwargs: dict[str, Any] = dict(SCALES[scale])
    if "params" in data:
        kwargs["params"] = Parameters.from_dict(_as_mapping(data["params"], "params"))
    if "bc" in data:
        bc = _as_mapping(data["bc"], "bc")
        if set(bc) - {"a"}:
            raise ValidationError(f"bc: unknown key(s) {sorted(set(bc) - {'a'})}")
        kwargs["bc"] = BoundaryCondition(_as_float(bc.get("a", 0.0), "bc.a"))
    if "ic" in data:
        kwargs["ic"] = InitialConditionSpec.from_dict(_as_mapping(data["ic"], "ic"))
    for key in ("n_cells", "record_every"):
        if key in data:
            kwargs[key] = _as_int(data[key], key)
    for key in ("dt", "t_end"):
        if key in data:
            kwargs[key] = _as_float(data[key], key)
    if "norm_mode" in data:
        kwargs["norm_mode"] = data["norm_mode"]
    if "output_path" in data:
        kwargs["output_path"] = data["output_path"]
    if "record_every" not in data:
        # keep roughly 2000 samples per run
        n_steps = max(1, int(round(kwargs["t_end"] / kwargs["dt"])))
        kwargs["record_every"] = max(1, n_steps // 2000)
    return RunConfig(**kwargs)


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path} must be a number (got {value!r})")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{path} must be an integer (got {value!r})")
    return value


def _as_mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ValidationError(f"{path} must be an object")
    return value
