"""Spatially homogeneous reduction: u = a y, constant stress and fluidity.

``ode_step`` is the PDE step restricted to one cell, so a PDE run with
constant data and a 0D run agree to round-off. ``ode_oracle`` is an
independent RK4 integrator used as ground truth in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DivergenceError, Parameters, ValidationError
from .equilibria import sigma
from .scheme import fluidity_root


@dataclass(frozen=True)
class OdeState:
    t: float
    tau: float
    f: float


@dataclass(frozen=True)
class OdeTrajectory:
    t: np.ndarray
    tau: np.ndarray
    f: np.ndarray

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, k: int) -> OdeState:
        return OdeState(float(self.t[k]), float(self.tau[k]), float(self.f[k]))

    @property
    def final(self) -> OdeState:
        return self[-1]

    def perturbation(self, tau_inf: float, f_inf: float) -> np.ndarray:
        """|tau - tau_inf| + |f - f_inf| along the trajectory."""
        return np.abs(self.tau - tau_inf) + np.abs(self.f - f_inf)


def ode_step(s: OdeState, p: Parameters, a: float, dt: float) -> OdeState:
    if not dt > 0:
        raise ValueError(f"dt must be positive (got {dt!r})")
    tau = s.tau + dt / p.lam * (p.g_mod * a - s.f * s.tau)
    f = fluidity_root(s.f, abs(tau), p.xi, p.nu, dt)
    return OdeState(s.t + dt, tau, f)


def ode_run(p: Parameters, a: float, tau0: float, f0: float, dt: float, t_end: float) -> OdeTrajectory:
    """Every step of the 0D scheme from t = 0 to ``t_end``."""
    if not f0 > 0:
        raise ValidationError(f"f0 must be positive (got {f0!r})")
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    tau = np.empty(n + 1)
    f = np.empty(n + 1)
    tau[0], f[0] = tau0, f0
    lam, ga, xi, nu = p.lam, p.g_mod * a, p.xi, p.nu
    k_tau, k_f = float(tau0), float(f0)
    for k in range(1, n + 1):
        k_tau = k_tau + dt / lam * (ga - k_f * k_tau)
        k_f = fluidity_root(k_f, abs(k_tau), xi, nu, dt)
        tau[k], f[k] = k_tau, k_f
    if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(f))):
        bad = int(np.argmin(np.isfinite(tau) & np.isfinite(f)))
        raise DivergenceError(f"non-finite 0D state at t={t[bad]:.6g}", "ode", float(t[bad]))
    return OdeTrajectory(t, tau, f)


def ode_rhs(p: Parameters, a: float, y: np.ndarray) -> np.ndarray:
    tau, f = y
    return np.array([(p.g_mod * a - f * tau) / p.lam, (-1.0 + p.xi * abs(tau)) * f * f - p.nu * f**3])


def _rk4(p, a, y, t_end, n):
    h = t_end / n
    for _ in range(n):
        k1 = ode_rhs(p, a, y)
        k2 = ode_rhs(p, a, y + 0.5 * h * k1)
        k3 = ode_rhs(p, a, y + 0.5 * h * k2)
        k4 = ode_rhs(p, a, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def ode_oracle(p: Parameters, a: float, tau0: float, f0: float, t_end: float,
               tol: float = 1e-10, n0: int = 64, max_halvings: int = 16) -> OdeState:
    """Classical RK4, halving the step until two successive answers differ by < ``tol``."""
    if not f0 > 0:
        raise ValidationError(f"f0 must be positive (got {f0!r})")
    y0 = np.array([tau0, f0], dtype=float)
    if t_end == 0:
        return OdeState(0.0, float(tau0), float(f0))
    n = n0
    prev = _rk4(p, a, y0, t_end, n)
    for _ in range(max_halvings):
        n *= 2
        cur = _rk4(p, a, y0, t_end, n)
        if np.max(np.abs(cur - prev)) < max(tol, 1e-12):
            return OdeState(float(t_end), float(cur[0]), float(cur[1]))
        prev = cur
    raise ArithmeticError(f"RK4 step halving did not reach tol={tol} with {n} steps")


def classify_region(p: Parameters, a: float, tau: float, f: float) -> str:
    """Which of the regions A1, A2, A3 of the (tau, f) quarter-plane holds the state.

    A3 is f >= sigma; below it, A1 lies above the nullcline f = (xi tau - 1)/nu
    and A2 below. Boundary points go to A3, then A1.
    """
    sig = sigma(p, a)
    if f >= sig:
        return "A3"
    return "A1" if f >= (p.xi * tau - 1.0) / p.nu else "A2"
