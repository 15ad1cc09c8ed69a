import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from couette_aging.core import (
    BoundaryCondition,
    DivergenceError,
    Grid,
    InitialConditionSpec,
    Parameters,
    RunConfig,
    State,
    build_initial_state,
)
from couette_aging.diagnostics import homogeneous_energy
from couette_aging.ode import OdeState, ode_step
from couette_aging.scheme import Stepper, fluidity_root, fluidity_update, run, step

DEF = Parameters()


def const_state(n, a, tau0, f0):
    g = Grid(n)
    return State(0.0, a * g.nodes, np.full(n, tau0), np.full(n, f0))


def test_quadratic_root_example():
    # 0.1 X^2 + X - 1 = 0
    x = fluidity_root(1.0, 1.0, 1.0, 1.0, 0.1)
    assert x == pytest.approx((-1 + np.sqrt(1.4)) / 0.2, rel=1e-15)
    assert x == pytest.approx(0.916079783099616, rel=1e-14)


def test_root_zero_stays_zero():
    assert fluidity_root(0.0, 10.0, 1.0, 1.0, 0.5) == 0.0


@given(f=st.floats(1e-12, 1e3), tau=st.floats(0, 1e3), xi=st.floats(1e-2, 10), nu=st.floats(1e-2, 10),
       dt=st.floats(1e-6, 1.0))
def test_root_solves_quadratic(f, tau, xi, nu, dt):
    x = fluidity_root(f, tau, xi, nu, dt)
    assert x > 0
    qa, qb = nu * dt * f, 1 + dt * f * (1 - xi * tau)
    scale = abs(qa * x * x) + abs(qb * x) + f
    assert abs(qa * x * x + qb * x - f) <= 1e-12 * scale


def _exact_fluidity(f0, tau, xi, nu, dt, n=4000):
    def rhs(f):
        return (-1 + xi * tau) * f * f - nu * f**3

    h = dt / n
    f = f0
    for _ in range(n):
        k1 = rhs(f)
        k2 = rhs(f + 0.5 * h * k1)
        k3 = rhs(f + 0.5 * h * k2)
        k4 = rhs(f + h * k3)
        f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return f


def test_fluidity_step_is_consistent():
    # local error O(dt^2): halving dt quarters it
    f0, tau = 0.8, 1.7
    errs = [abs(fluidity_root(f0, tau, 1.0, 1.0, dt) - _exact_fluidity(f0, tau, 1.0, 1.0, dt))
            for dt in (0.04, 0.02, 0.01)]
    for e1, e2 in zip(errs, errs[1:]):
        assert e1 / e2 == pytest.approx(4.0, rel=0.2)


def test_fluidity_update_vectorised():
    f = np.array([0.0, 0.5, 1.0])
    tau = np.array([1.0, -2.0, 0.3])
    out = fluidity_update(f, tau, DEF, 0.01)
    expect = [fluidity_root(a, abs(b), DEF.xi, DEF.nu, 0.01) for a, b in zip(f, tau)]
    np.testing.assert_array_equal(out, expect)


@pytest.mark.parametrize("c", [0.0, 0.7, -1.3])
def test_homogeneous_fixed_point(c):
    s = State(0.0, np.zeros(11), np.full(10, c), np.zeros(10))
    new, rep = step(s, DEF, BoundaryCondition(0.0), 0.01)
    np.testing.assert_array_equal(new.u, 0.0)
    np.testing.assert_array_equal(new.tau, c)
    np.testing.assert_array_equal(new.f, 0.0)
    assert rep.t_new == pytest.approx(0.01)


def test_step_does_not_mutate_input():
    s = const_state(8, 1.0, 0.5, 0.5)
    before = s.copy()
    step(s, DEF, BoundaryCondition(1.0), 0.01)
    np.testing.assert_array_equal(s.tau, before.tau)
    assert s.t == 0.0


def test_step_rejects_negative_fluidity():
    s = const_state(4, 0.0, 0.0, 0.1)
    s.f[1] = -1e-3
    with pytest.raises(ValueError):
        step(s, DEF, BoundaryCondition(0.0), 0.01)


def test_linear_velocity_preserved():
    # u = a y with constant tau is an exact momentum solution
    s = const_state(20, 1.3, 0.4, 0.6)
    new, _ = step(s, DEF, BoundaryCondition(1.3), 0.01)
    np.testing.assert_allclose(new.u, 1.3 * Grid(20).nodes, rtol=0, atol=1e-13)


def test_constant_data_matches_ode_step():
    p, a, dt = DEF, 1.0, 0.01
    s = const_state(16, a, 0.5, 0.5)
    o = OdeState(0.0, 0.5, 0.5)
    stepper = Stepper(p, s.grid, BoundaryCondition(a), dt)
    for _ in range(200):
        stepper.advance(s, 1)
        o = ode_step(o, p, a, dt)
        np.testing.assert_allclose(s.tau, o.tau, rtol=0, atol=1e-12)
        np.testing.assert_allclose(s.f, o.f, rtol=0, atol=1e-12)


def random_state(data, n):
    elems = st.floats(-1, 1)
    u = np.array(data.draw(st.lists(elems, min_size=n + 1, max_size=n + 1)))
    tau = np.array(data.draw(st.lists(elems, min_size=n, max_size=n)))
    f = np.array(data.draw(st.lists(st.one_of(st.just(0.0), st.floats(0, 1)), min_size=n, max_size=n)))
    return u, tau, f


@settings(max_examples=50)
@given(data=st.data(), n=st.integers(2, 24), a=st.floats(0, 2), dt=st.floats(1e-3, 1e-2))
def test_fluidity_sign_invariants(data, n, a, dt):
    u, tau, f = random_state(data, n)
    u[0], u[-1] = 0.0, a
    s = State(0.0, u, tau, f)
    zero = f == 0
    stepper = Stepper(DEF, s.grid, BoundaryCondition(a), dt)
    for _ in range(20):
        stepper.advance(s, 1)
        assert np.all(s.f >= 0)
        assert np.all(s.f[zero] == 0)
        assert np.all(s.f[~zero] > 0)


def test_mean_stress_conserved_without_fluidity():
    cfg = RunConfig(n_cells=50, t_end=5.0, record_every=50,
                    ic=InitialConditionSpec(kind="zero-fluidity", tau_mean=0.3, tau_amplitude=0.5))
    s0 = build_initial_state(cfg.ic, cfg.grid, cfg.bc)
    mean0 = s0.tau.mean()
    final, records = run(cfg)
    assert mean0 == pytest.approx(0.3, abs=1e-14)
    assert abs(final.tau.mean() - mean0) < 1e-13
    for r in records:
        assert abs(r.mean_tau - mean0) < 1e-13


def test_energy_non_increasing_homogeneous_sine():
    cfg = RunConfig(n_cells=100, t_end=20.0, record_every=10)
    grid = cfg.grid
    energies = []
    run(cfg, observer=lambda s: energies.append(homogeneous_energy(s.u, s.tau, grid, cfg.params)))
    e = np.array(energies)
    assert np.all(np.diff(e) <= 1e-6 * e[:-1])
    assert e[-1] < 0.5 * e[0]


def test_run_zero_length():
    cfg = RunConfig(n_cells=10, t_end=0.0)
    final, records = run(cfg)
    assert len(records) == 1
    assert records[0].t == 0.0 and final.t == 0.0


def test_run_sampling_and_time():
    cfg = RunConfig(n_cells=10, t_end=1.05, dt=0.01, record_every=25)
    final, records = run(cfg)
    assert [r.t for r in records] == pytest.approx([0, 0.25, 0.5, 0.75, 1.0, 1.05])
    assert final.t == pytest.approx(1.05)


def test_run_uses_given_initial_state():
    cfg = RunConfig(n_cells=10, t_end=0.1, bc=BoundaryCondition(1.0),
                    ic=InitialConditionSpec(kind="constant", u_slope=1.0, tau0=0.5, f0=0.5))
    init = const_state(10, 1.0, 0.5, 0.5)
    a, _ = run(cfg)
    b, _ = run(cfg, initial=init)
    np.testing.assert_array_equal(a.tau, b.tau)
    assert init.t == 0.0


def test_divergence_reports_stage():
    # explicit stress update with dt G / (eta lambda) far above 2
    p = Parameters(lam=1e-3)
    s = const_state(10, 0.0, 0.0, 0.0)
    s.tau[:] = np.sin(np.arange(10))
    with pytest.raises(DivergenceError) as info:
        Stepper(p, s.grid, BoundaryCondition(0.0), 0.5).advance(s, 5000)
    assert info.value.stage in ("momentum", "stress", "fluidity")
    assert info.value.t > 0
    assert info.value.stage in str(info.value)
