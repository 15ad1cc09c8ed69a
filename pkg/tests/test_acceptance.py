"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
repeated in an "acceptance criteria" section at the end of the pytest run.
Tolerances are those of the desk scale. ``--paper-scale`` adds the slope
criteria at full resolution with halved tolerances.
"""

import time

import numpy as np
import pytest

from couette_aging.core import BoundaryCondition, Grid, Parameters, State
from couette_aging.diagnostics import homogeneous_energy
from couette_aging.equilibria import steady_nonhomogeneous
from couette_aging.fem1d import assemble_momentum_operator, solve_tridiagonal
from couette_aging.ode import ode_run
from couette_aging.presets import fig_bc0, fig_beta, fig_nonhom, run_preset
from couette_aging.scheme import Stepper, fluidity_root


def describe(checks):
    return "; ".join(f"{c.name}={c.value:.4g}" + ("" if c.passed else " FAILED") for c in checks)


@pytest.fixture(scope="module")
def bc0_run():
    start = time.perf_counter()
    (outcome,) = fig_bc0("desk")
    return outcome, time.perf_counter() - start


@pytest.fixture(scope="module")
def beta_runs():
    return fig_beta("desk")


def test_criterion_1_ode_rates(verdict):
    fluidity_root(0.5, 0.5, 1.0, 1.0, 0.01)  # JIT warm-up is not part of the preset runtime
    start = time.perf_counter()
    result = run_preset("fig-ode")
    elapsed = time.perf_counter() - start
    rates = {r.name: (r.fits["perturbation"]["rate"], r.fits["stability"]["c_r"]) for r in result.runs}
    ok = result.passed and elapsed < 1.0
    detail = ", ".join(f"{k}: {a:.4f} vs C_r {b:.4f}" for k, (a, b) in rates.items()) + f", {elapsed:.2f}s"
    verdict("criterion 1 ODE exponential rates", ok, detail)


def test_criterion_2_homogeneous_slopes(verdict, bc0_run):
    outcome, elapsed = bc0_run
    slopes = [c for c in outcome.checks if c.name.startswith("slope")]
    ok = all(c.passed for c in slopes) and elapsed < 60.0
    verdict("criterion 2 homogeneous power-law slopes", ok, f"{describe(slopes)}; {elapsed:.1f}s")


def test_criterion_3_beta_sweep(verdict, beta_runs):
    checks = [c for r in beta_runs if r.name.startswith("fig-beta") for c in r.checks]
    assert len(checks) == 3
    detail = "; ".join(f"{c.name}: {c.value:.3f} vs {c.expected:.3f}" for c in checks)
    verdict("criterion 3 beta-sweep slopes", all(c.passed for c in checks), detail)


def test_criterion_4_fluidity_sandwich(verdict, bc0_run):
    outcome, _ = bc0_run
    (check,) = [c for c in outcome.checks if "sandwich" in c.name]
    verdict("criterion 4 fluidity sandwich", check.passed, check.detail)


def test_criterion_5_zero_fluidity(verdict, beta_runs):
    (run,) = [r for r in beta_runs if r.name == "zero-fluidity"]
    verdict("criterion 5 zero-fluidity exponential decay", all(c.passed for c in run.checks), describe(run.checks))


def test_criterion_6_nonhomogeneous_convergence(verdict):
    (outcome,) = fig_nonhom("desk")
    verdict("criterion 6 non-homogeneous convergence", all(c.passed for c in outcome.checks),
            describe(outcome.checks))


def random_parameters(rng):
    return Parameters(rho=10 ** rng.uniform(-3, 0), eta=rng.uniform(0.5, 2), lam=rng.uniform(0.1, 2),
                      g_mod=rng.uniform(0.5, 2), xi=rng.uniform(0.5, 2), nu=rng.uniform(0.5, 2))


def test_criterion_7_steady_state_exactness(verdict):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        p = Parameters(*(10 ** rng.uniform(-3, 3, size=6)))
        a = 10 ** rng.uniform(-3, 3)
        ss = steady_nonhomogeneous(p, a)
        worst = max(worst, abs(ss.f * ss.tau - p.g_mod * a) / (p.g_mod * a),
                    abs(p.nu * ss.f - (-1 + p.xi * ss.tau)) / max(1.0, p.xi * ss.tau))
    p, a = Parameters(), 1.0
    ss = steady_nonhomogeneous(p, a)
    grid = Grid(50)
    u0, tau0, f0 = ss.fields(grid)
    state = State(0.0, u0, tau0, f0)
    Stepper(p, grid, BoundaryCondition(a), 0.01).advance(state, 10_000)
    drift = max(np.max(np.abs(state.u - u0)), np.max(np.abs(state.tau - tau0)), np.max(np.abs(state.f - f0)))
    ok = worst <= 1e-12 and drift <= 1e-10
    verdict("criterion 7 steady-state exactness", ok, f"max relative residual {worst:.2e}, drift {drift:.2e}")


def test_criterion_8_pde_ode_equivalence(verdict):
    p, a, dt, n = Parameters(), 1.0, 0.01, 10_000
    tau0, f0 = 0.5, 0.5
    traj = ode_run(p, a, tau0, f0, dt, n * dt)
    grid = Grid(20)
    state = State(0.0, a * grid.nodes, np.full(20, tau0), np.full(20, f0))
    stepper = Stepper(p, grid, BoundaryCondition(a), dt)
    worst = 0.0
    for k in range(1, n + 1):
        stepper.advance(state, 1)
        worst = max(worst, np.max(np.abs(state.tau - traj.tau[k])), np.max(np.abs(state.f - traj.f[k])))
    verdict("criterion 8 PDE-ODE equivalence", worst <= 1e-12, f"max per-step deviation {worst:.2e}")


def dense_solve(a, b):
    """Gaussian elimination with partial pivoting."""
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    n = b.size
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        a[[k, piv]], b[[k, piv]] = a[[piv, k]], b[[piv, k]]
        for i in range(k + 1, n):
            m = a[i, k] / a[k, k]
            a[i, k:] -= m * a[k, k:]
            b[i] -= m * b[k]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x


def test_criterion_9_invariants(verdict):
    rng = np.random.default_rng(9)
    failures = []
    worst_energy = -np.inf
    worst_solve = 0.0
    for trial in range(100):
        p = random_parameters(rng)
        n = int(rng.integers(2, 41))
        dt = rng.uniform(1e-3, 1e-2)
        grid = Grid(n)
        u = rng.uniform(-1, 1, n + 1)
        u[0] = u[-1] = 0.0
        f = np.where(rng.random(n) < 0.3, 0.0, rng.uniform(0, 1, n))
        state = State(0.0, u, rng.uniform(-1, 1, n), f)
        zero = f == 0
        stepper = Stepper(p, grid, BoundaryCondition(0.0), dt)
        energy = homogeneous_energy(state.u, state.tau, grid, p)
        for _ in range(50):
            stepper.advance(state, 1)
            if np.any(state.f < 0) or np.any(state.f[zero] != 0):
                failures.append(f"trial {trial}: fluidity sign")
            new = homogeneous_energy(state.u, state.tau, grid, p)
            worst_energy = max(worst_energy, (new - energy) / energy)
            energy = new
        if n <= 17:
            op = assemble_momentum_operator(p, grid, dt)
            rhs = rng.normal(size=op.size)
            x = solve_tridiagonal(op, rhs)
            ref = dense_solve(op.to_dense(), rhs)
            worst_solve = max(worst_solve, float(np.max(np.abs(x - ref)) / np.max(np.abs(ref))))
    ok = not failures and worst_energy <= 1e-6 and worst_solve <= 1e-10
    detail = (f"sign violations {len(failures)}, max relative energy increase {worst_energy:.1e}, "
              f"max tridiagonal error {worst_solve:.1e}")
    verdict("criterion 9 invariant suite", ok, detail)


@pytest.mark.paper
@pytest.mark.parametrize("preset", ["fig-bc0", "fig-beta"])
def test_paper_scale_slopes(verdict, preset):
    result = run_preset(preset, scale="paper")
    slopes = [c for c in result.checks if c.name.startswith("slope")]
    verdict(f"paper scale {preset}", all(c.passed for c in slopes), describe(slopes))
