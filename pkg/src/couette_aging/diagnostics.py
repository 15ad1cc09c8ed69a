"""Norms, support measure, time-series records and decay-rate fits."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Grid, Parameters, State
from .equilibria import SteadyState

# log fits ignore samples below this value
LOG_FLOOR = 1e-14


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    l2_u: float
    h1semi_u: float
    l2_tau: float
    l2_f: float
    linf_tau: float
    linf_f: float
    mean_tau: float
    mean_f: float
    l2_tau_fluct: float
    l2_combo: float
    l2_dUdy: float
    energy_homogeneous: float

    def as_row(self) -> list[float]:
        return [getattr(self, name) for name in FIELDS]


FIELDS = tuple(f.name for f in dataclasses.fields(DiagnosticsRecord))


def l2_p0(v: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.h * np.dot(v, v)))


def l2_p1(u: np.ndarray, grid: Grid) -> float:
    """Exact L2 norm of the piecewise-linear interpolant."""
    a, b = u[:-1], u[1:]
    return float(np.sqrt(grid.h / 3.0 * np.sum(a * a + a * b + b * b)))


def homogeneous_energy(u: np.ndarray, tau: np.ndarray, grid: Grid, p: Parameters) -> float:
    """G rho ||u||^2 + lambda ||tau||^2."""
    return p.g_mod * p.rho * l2_p1(u, grid) ** 2 + p.lam * l2_p0(tau, grid) ** 2


def record(state: State, grid: Grid, p: Parameters, reference: SteadyState | None = None) -> DiagnosticsRecord:
    """Sample every monitored norm; with ``reference`` the norms are of the perturbation."""
    u, tau, f = state.u, state.tau, state.f
    if reference is not None:
        u_ref, tau_ref, f_ref = reference.fields(grid)
        u, tau, f = u - u_ref, tau - tau_ref, f - f_ref
    h = grid.h
    du = np.diff(u) / h
    mean_tau = h * float(np.sum(tau))
    fluct = tau - mean_tau
    combo = p.eta * du + fluct
    return DiagnosticsRecord(
        t=float(state.t),
        l2_u=l2_p1(u, grid),
        h1semi_u=l2_p0(du, grid),
        l2_tau=l2_p0(tau, grid),
        l2_f=l2_p0(f, grid),
        linf_tau=float(np.max(np.abs(tau))),
        linf_f=float(np.max(np.abs(f))),
        mean_tau=mean_tau,
        mean_f=h * float(np.sum(f)),
        l2_tau_fluct=l2_p0(fluct, grid),
        l2_combo=l2_p0(combo, grid),
        l2_dUdy=l2_p0(du + fluct / p.eta, grid),
        energy_homogeneous=homogeneous_energy(u, tau, grid, p),
    )


def column(records: Sequence[DiagnosticsRecord], name: str) -> np.ndarray:
    """One field of a record series as an array; ``a+b`` sums columns."""
    parts = name.split("+")
    for part in parts:
        if part not in FIELDS:
            raise KeyError(f"unknown column {part!r}")
    return np.sum([[getattr(r, part) for r in records] for part in parts], axis=0)


def measure_beta(f0: np.ndarray, grid: Grid) -> float:
    """Measure of the set where the (cellwise) fluidity is positive."""
    f0 = np.asarray(f0, dtype=float)
    if np.any(f0 < 0):
        raise ValueError("fluidity must be non-negative")
    return grid.h * int(np.count_nonzero(f0 > 0))


@dataclass(frozen=True)
class RateFit:
    model: str
    rate: float
    intercept: float
    window: tuple[float, float]
    rms_residual: float
    n_points: int

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["window"] = list(self.window)
        return d


def _select(t, v, window, floor):
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"empty fit window [{lo}, {hi}]")
    inside = (t >= lo) & (t <= hi)
    if np.any(v[inside] <= 0):
        raise ValueError("non-positive value inside the fit window; shrink the window")
    keep = inside & (v > floor)
    if np.count_nonzero(keep) < 5:
        raise ValueError(
            f"only {np.count_nonzero(keep)} usable points in window [{lo}, {hi}]; need at least 5"
        )
    return t[keep], v[keep]


def _line_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def fit_power_law(t, v, window: tuple[float, float], floor: float = LOG_FLOOR) -> RateFit:
    """Least-squares line through (ln(1+t), ln v); ``rate`` is the slope.

    Positive samples at or below ``floor`` are dropped; a non-positive
    sample inside the window is an error.
    """
    ts, vs = _select(t, v, window, floor)
    slope, intercept, rms = _line_fit(np.log1p(ts), np.log(vs))
    return RateFit("power-law", slope, intercept, (float(window[0]), float(window[1])), rms, ts.size)


def fit_exponential(t, v, window: tuple[float, float], floor: float = LOG_FLOOR) -> RateFit:
    """Least-squares line through (t, ln v); ``rate`` is minus the slope."""
    ts, vs = _select(t, v, window, floor)
    slope, intercept, rms = _line_fit(ts, np.log(vs))
    return RateFit("exponential", -slope, intercept, (float(window[0]), float(window[1])), rms, ts.size)


@dataclass(frozen=True)
class SandwichResult:
    per_cell: np.ndarray
    passed: bool
    t0: float


def sandwich_check(
    times: Iterable[float],
    f_series: np.ndarray,
    t0: float,
    alpha: float,
    rtol: float = 1e-12,
) -> SandwichResult:
    """Check ``1/(1/f(t0)+(1+alpha)s) <= f(t0+s) <= 1/(1/f(t0)+(1-alpha)s)``.

    ``f_series`` has one row per sample time and one column per cell. The
    reference sample is the first one at or after ``t0``. Cells that are zero
    at the reference time must stay exactly zero.
    """
    times = np.asarray(list(times), dtype=float)
    f_series = np.asarray(f_series, dtype=float)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1) (got {alpha!r})")
    idx = np.flatnonzero(times >= t0 - 1e-9)
    if idx.size == 0:
        raise ValueError(f"t0={t0} lies beyond the last sample")
    k = idx[0]
    f_ref = f_series[k]
    later = times > times[k]
    s = (times[later] - times[k])[:, None]
    f_later = f_series[later]
    positive = f_ref > 0
    with np.errstate(divide="ignore"):
        inv = np.where(positive, 1.0 / np.where(positive, f_ref, 1.0), np.inf)
    lower = 1.0 / (inv + (1.0 + alpha) * s)
    upper = 1.0 / (inv + (1.0 - alpha) * s)
    ok_pos = np.all((f_later >= lower * (1 - rtol)) & (f_later <= upper * (1 + rtol)), axis=0)
    ok_zero = np.all(f_later == 0.0, axis=0)
    per_cell = np.where(positive, ok_pos, ok_zero)
    return SandwichResult(per_cell, bool(np.all(per_cell)), float(times[k]))
