"""Semi-implicit time stepping of the velocity/stress/fluidity system.

One step, with the stress lagged in the momentum equation:

1. momentum:  (rho/dt) M u_n + eta K u_n = (rho/dt) M u_{n-1} + div(tau_{n-1}),
   with u_n(0) = 0 and u_n(1) = a;
2. stress:    tau_n = tau_{n-1} + (dt/lambda) (G du_n/dy - f_{n-1} tau_{n-1});
3. fluidity:  f_n is the non-negative root of
   nu dt f_{n-1} X^2 + (1 + dt f_{n-1} (1 - xi|tau_n|)) X - f_{n-1} = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .core import DivergenceError, Grid, Parameters, RunConfig, State, BoundaryCondition, build_initial_state
from .diagnostics import DiagnosticsRecord, homogeneous_energy, record
from .equilibria import SteadyState, steady_homogeneous, steady_nonhomogeneous
from .fem1d import TridiagonalSystem, _thomas, assemble_momentum_operator, off_diagonal_coefficient

log = logging.getLogger(__name__)

STAGES = {1: "momentum", 2: "stress", 3: "fluidity"}


@numba.njit(cache=True)
def fluidity_root(f_prev, abs_tau, xi, nu, dt):
    """Non-negative root of the implicit fluidity update for one cell."""
    if f_prev == 0.0:
        return 0.0
    qa = nu * dt * f_prev
    qb = 1.0 + dt * f_prev * (1.0 - xi * abs_tau)
    disc = math.sqrt(qb * qb + 4.0 * qa * f_prev)
    # roots have opposite signs (qa > 0, constant term -f_prev < 0);
    # pick the cancellation-free expression of the positive one
    if qb >= 0.0:
        return 2.0 * f_prev / (qb + disc)
    return (disc - qb) / (2.0 * qa)


def fluidity_update(f_prev: np.ndarray, tau_new: np.ndarray, p: Parameters, dt: float) -> np.ndarray:
    """Vectorised :func:`fluidity_root`."""
    f_prev = np.asarray(f_prev, dtype=float)
    abs_tau = np.abs(np.asarray(tau_new, dtype=float))
    out = np.empty_like(f_prev)
    for j in range(f_prev.size):
        out[j] = fluidity_root(f_prev[j], abs_tau[j], p.xi, p.nu, dt)
    return out


@numba.njit(cache=True)
def _advance(u, tau, f, n_steps, rho, lam, g_mod, xi, nu, a, dt, h, c_bc, lower, diag, upper):
    """Advance in place; returns (status, steps completed). status 0 = ok, else stage code."""
    n = tau.size
    m = n - 1
    rhs = np.empty(m)
    sol = np.empty(m)
    mass = rho / dt * h / 6.0
    for step in range(n_steps):
        for i in range(m):
            k = i + 1
            rhs[i] = mass * (u[k - 1] + 4.0 * u[k] + u[k + 1]) + (tau[k] - tau[k - 1])
        rhs[m - 1] -= c_bc * a
        if _thomas(lower, diag, upper, rhs, sol) != 0:
            return 1, step
        u[0] = 0.0
        u[n] = a
        for i in range(m):
            if not math.isfinite(sol[i]):
                return 1, step
            u[i + 1] = sol[i]
        for j in range(n):
            grad = (u[j + 1] - u[j]) / h
            t_new = tau[j] + dt / lam * (g_mod * grad - f[j] * tau[j])
            if not math.isfinite(t_new):
                return 2, step
            f_new = fluidity_root(f[j], abs(t_new), xi, nu, dt)
            if not math.isfinite(f_new):
                return 3, step
            tau[j] = t_new
            f[j] = f_new
    return 0, n_steps


@dataclass(frozen=True)
class StepReport:
    t_new: float
    max_f: float
    min_f: float
    fluidity_root_iterations: int
    energy_homogeneous: float


class Stepper:
    """Holds the factorised-once operator data for repeated stepping."""

    def __init__(self, p: Parameters, grid: Grid, bc: BoundaryCondition, dt: float,
                 op: TridiagonalSystem | None = None):
        self.p, self.grid, self.bc, self.dt = p, grid, bc, dt
        self.op = op if op is not None else assemble_momentum_operator(p, grid, dt)
        if self.op.size != grid.n_cells - 1:
            raise ValueError("operator size does not match the grid")
        self._lower = np.ascontiguousarray(self.op.lower, dtype=float)
        self._diag = np.ascontiguousarray(self.op.diag, dtype=float)
        self._upper = np.ascontiguousarray(self.op.upper, dtype=float)
        self._c_bc = off_diagonal_coefficient(p, grid, dt)

    def advance(self, state: State, n_steps: int) -> State:
        """Take ``n_steps`` steps in place and return ``state``."""
        p = self.p
        status, done = _advance(
            state.u, state.tau, state.f, n_steps,
            p.rho, p.lam, p.g_mod, p.xi, p.nu, float(self.bc.a), self.dt, self.grid.h,
            self._c_bc, self._lower, self._diag, self._upper,
        )
        state.t += done * self.dt
        if status:
            t_fail = state.t + self.dt
            raise DivergenceError(
                f"non-finite value in {STAGES[status]} stage at t={t_fail:.6g}", STAGES[status], t_fail
            )
        return state


def step(state: State, p: Parameters, bc: BoundaryCondition, dt: float,
         op: TridiagonalSystem | None = None) -> tuple[State, StepReport]:
    """One time step; returns a new State and a short report."""
    if np.any(state.f < 0):
        raise ValueError("fluidity must be non-negative on entry")
    grid = state.grid
    new = Stepper(p, grid, bc, dt, op).advance(state.copy(), 1)
    report = StepReport(
        t_new=new.t,
        max_f=float(new.f.max()),
        min_f=float(new.f.min()),
        fluidity_root_iterations=0,
        energy_homogeneous=homogeneous_energy(new.u, new.tau, grid, p),
    )
    return new, report


def reference_state(config: RunConfig, initial: State) -> SteadyState:
    """Steady state the run is expected to approach."""
    if config.bc.a > 0:
        return steady_nonhomogeneous(config.params, config.bc.a)
    if np.all(initial.f == 0):
        # f stays zero and the mean stress is conserved
        return steady_homogeneous(initial.grid.h * float(initial.tau.sum()))
    return steady_homogeneous(0.0)


def run(config: RunConfig, observer: Callable[[State], None] | None = None,
        initial: State | None = None) -> tuple[State, list[DiagnosticsRecord]]:
    """Integrate from t = 0 to ``config.t_end`` and sample diagnostics.

    A record is taken at t = 0, every ``record_every`` steps, and at the final
    step. ``observer`` is called with the live state at each record.
    """
    grid = config.grid
    state = initial.copy() if initial is not None else build_initial_state(config.ic, grid, config.bc)
    stepper = Stepper(config.params, grid, config.bc, config.dt)
    ref = reference_state(config, state) if config.norm_mode == "relative-to-steady" else None

    records = [record(state, grid, config.params, ref)]
    if observer is not None:
        observer(state)
    n_steps = config.n_steps
    done = 0
    log.debug("run: %d steps, dt=%g, N=%d", n_steps, config.dt, grid.n_cells)
    while done < n_steps:
        chunk = min(config.record_every, n_steps - done)
        stepper.advance(state, chunk)
        done += chunk
        # avoid drift from repeated addition of dt
        state.t = done * config.dt
        records.append(record(state, grid, config.params, ref))
        if observer is not None:
            observer(state)
    return state, records
