"""Closed-form steady states and the stability quantities of the 0D reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Grid, Parameters, ValidationError


def _sqrt1p_minus1(x: float) -> float:
    # sqrt(1 + x) - 1 without cancellation for small x
    return x / (math.sqrt(1.0 + x) + 1.0)


@dataclass(frozen=True)
class SteadyState:
    """A stationary solution.

    ``kind`` is ``"homogeneous"``, ``"nonhomogeneous"`` or ``"piecewise"``.
    For the piecewise family the fluid region is ``[0, boundary)`` and the
    tuples hold (fluid, solid) values; otherwise they hold a single value.
    """

    kind: str
    a: float
    u_slope: tuple[float, ...]
    tau_inf: tuple[float, ...]
    f_inf: tuple[float, ...]
    boundary: float = 1.0

    @property
    def tau(self) -> float:
        return self.tau_inf[0]

    @property
    def f(self) -> float:
        return self.f_inf[0]

    def fields(self, grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodal velocity and cellwise stress/fluidity on ``grid``."""
        y, ym = grid.nodes, grid.midpoints
        if self.kind != "piecewise":
            u = self.u_slope[0] * y
            u[-1] = self.a
            return u, np.full(grid.n_cells, self.tau_inf[0]), np.full(grid.n_cells, self.f_inf[0])
        b = self.boundary
        u = np.where(y < b, self.u_slope[0] * y, self.a)
        fluid = ym < b
        tau = np.where(fluid, self.tau_inf[0], self.tau_inf[1])
        f = np.where(fluid, self.f_inf[0], self.f_inf[1])
        return u, tau, f

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.a,
            "u_slope": list(self.u_slope),
            "tau_inf": list(self.tau_inf),
            "f_inf": list(self.f_inf),
            "boundary": self.boundary,
        }


def steady_homogeneous(c: float = 0.0) -> SteadyState:
    """The rest state (u = 0, tau = c, f = 0) for a = 0."""
    return SteadyState("homogeneous", 0.0, (0.0,), (float(c),), (0.0,))


def steady_nonhomogeneous(p: Parameters, a: float) -> SteadyState:
    """Unique steady state with positive fluidity everywhere, for a > 0."""
    if not a > 0:
        raise ValidationError(f"a must be positive for the non-homogeneous steady state (got {a!r})")
    x = 4.0 * p.nu * p.xi * p.g_mod * a
    s = _sqrt1p_minus1(x)
    tau_inf = (s + 2.0) / (2.0 * p.xi)
    f_inf = s / (2.0 * p.nu)
    return SteadyState("nonhomogeneous", a, (a,), (tau_inf,), (f_inf,))


def steady_piecewise(p: Parameters, a: float, beta_inf: float) -> SteadyState:
    """Steady state that is fluid on a region of measure ``beta_inf`` and solid elsewhere."""
    if not a > 0:
        raise ValidationError(f"a must be positive (got {a!r})")
    if not (0.0 < beta_inf <= 1.0):
        raise ValidationError(f"beta_inf must lie in (0, 1] (got {beta_inf!r})")
    slope = a / beta_inf
    s = _sqrt1p_minus1(4.0 * p.nu * p.xi * p.g_mod * slope)
    tau_l = (s + 2.0) / (2.0 * p.xi)
    f_l = s / (2.0 * p.nu)  # == (-1 + xi*tau_l)/nu
    if beta_inf == 1.0:
        return SteadyState("nonhomogeneous", a, (a,), (tau_l,), (f_l,))
    return SteadyState(
        "piecewise",
        a,
        (slope, 0.0),
        (tau_l, p.eta * slope + tau_l),
        (f_l, 0.0),
        boundary=beta_inf,
    )


def sigma(p: Parameters, a: float) -> float:
    """Region threshold used in the boundedness argument."""
    tau_inf = steady_nonhomogeneous(p, a).tau
    ga = p.g_mod * a
    first = 3.0 * ga / (ga * p.nu + 4.0 * tau_inf)
    second = _sqrt1p_minus1(4.0 * p.nu * p.xi * ga) / (3.0 * p.nu)
    return min(first, second)


def _bound_term(p: Parameters, a: float, sig: float) -> float:
    ga = p.g_mod * a
    return p.lam * p.xi / (2.0 * ga) * ((p.nu * sig + 1.0) / p.xi + 4.0 / p.xi) ** 2


class DulacResult(NamedTuple):
    holds: bool
    lhs: float


def dulac_condition(p: Parameters, a: float) -> DulacResult:
    """Evaluate the sufficient no-periodic-orbit condition ``lhs < 0``."""
    sig = sigma(p, a)
    lhs = -1.0 / p.lam - 2.0 + 2.0 * p.xi * (1.0 + p.g_mod * a) * (1.0 / sig + _bound_term(p, a, sig))
    return DulacResult(lhs < 0.0, lhs)


def fluidity_floor_m_f(p: Parameters, a: float, f0: float) -> float:
    """Lower bound on the 0D fluidity for a trajectory started at ``f0 > 0``."""
    if not f0 > 0:
        raise ValidationError(f"f0 must be positive (got {f0!r})")
    sig = sigma(p, a)
    return 1.0 / (max(1.0 / f0, 1.0 / sig) + _bound_term(p, a, sig))


def jacobian(p: Parameters, a: float) -> np.ndarray:
    """Linearisation of the 0D system at its positive steady state, in (tau, f) order."""
    ss = steady_nonhomogeneous(p, a)
    t, f = ss.tau, ss.f
    return np.array([[-f / p.lam, -t / p.lam], [p.xi * f * f, -p.nu * f * f]])


@dataclass(frozen=True)
class StabilityReport:
    delta: float
    c_r: float
    eigen_class: str
    sigma: float
    dulac_holds: bool
    dulac_lhs: float
    m_f: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def linearized_rate(p: Parameters, a: float, f0: float | None = None) -> StabilityReport:
    """Discriminant, exponential rate C_r and companion quantities.

    ``m_f`` is evaluated for the initial fluidity ``f0`` (default: the steady
    fluidity).
    """
    ss = steady_nonhomogeneous(p, a)
    t, f = ss.tau, ss.f
    half_trace = 0.5 * (f / p.lam + p.nu * f * f)
    delta = f * f * ((1.0 / p.lam + p.nu * f) ** 2 - 4.0 * (p.nu * f / p.lam + p.xi * t / p.lam))
    if delta >= 0.0:
        c_r = half_trace - 0.5 * math.sqrt(delta)
        eigen_class = "real-negative-pair"
    else:
        c_r = half_trace
        eigen_class = "complex-pair"
    dulac = dulac_condition(p, a)
    return StabilityReport(
        delta=delta,
        c_r=c_r,
        eigen_class=eigen_class,
        sigma=sigma(p, a),
        dulac_holds=dulac.holds,
        dulac_lhs=dulac.lhs,
        m_f=fluidity_floor_m_f(p, a, f if f0 is None else f0),
    )
