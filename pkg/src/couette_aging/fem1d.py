"""P1/P0 finite-element operators on a uniform mesh of [0, 1].

The momentum operator acts on the N-1 interior velocity nodes only; the
Dirichlet nodes are eliminated and their contribution is moved to the
right-hand side (see :func:`dirichlet_correction`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import Grid, Parameters


@dataclass(frozen=True)
class TridiagonalSystem:
    """Banded storage of a tridiagonal matrix.

    Row ``i`` reads ``lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1]``;
    ``lower[0]`` and ``upper[-1]`` are ignored (kept at zero).
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("lower, diag and upper must have the same length")

    @property
    def size(self) -> int:
        return len(self.diag)

    def is_diagonally_dominant(self) -> bool:
        off = np.abs(self.lower) + np.abs(self.upper)
        off[0] -= abs(self.lower[0])
        off[-1] -= abs(self.upper[-1])
        return bool(np.all(np.abs(self.diag) > off))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[1:] += self.lower[1:] * x[:-1]
        y[:-1] += self.upper[:-1] * x[1:]
        return y

    def to_dense(self) -> np.ndarray:
        n = self.size
        a = np.diag(self.diag.astype(float))
        idx = np.arange(n - 1)
        a[idx + 1, idx] = self.lower[1:]
        a[idx, idx + 1] = self.upper[:-1]
        return a


def assemble_momentum_operator(p: Parameters, grid: Grid, dt: float) -> TridiagonalSystem:
    """Interior-node matrix of ``(rho/dt) M + eta K``.

    M is the consistent P1 mass matrix (stencil h/6 [1, 4, 1]) and K the P1
    stiffness matrix (stencil 1/h [-1, 2, -1]).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive (got {dt!r})")
    h = grid.h
    m = grid.n_cells - 1
    mass = p.rho / dt
    d = mass * 4.0 * h / 6.0 + p.eta * 2.0 / h
    o = mass * h / 6.0 - p.eta / h
    lower = np.full(m, o)
    upper = np.full(m, o)
    lower[0] = 0.0
    upper[-1] = 0.0
    return TridiagonalSystem(lower, np.full(m, d), upper)


def off_diagonal_coefficient(p: Parameters, grid: Grid, dt: float) -> float:
    """Coupling between neighbouring nodes; multiplies the Dirichlet values."""
    return p.rho / dt * grid.h / 6.0 - p.eta / grid.h


@numba.njit(cache=True)
def _thomas(lower, diag, upper, rhs, out):
    n = diag.size
    cp = np.empty(n)
    dp = np.empty(n)
    if diag[0] == 0.0:
        return 1
    cp[0] = upper[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        den = diag[i] - lower[i] * cp[i - 1]
        if den == 0.0:
            return 1
        cp[i] = upper[i] / den
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / den
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return 0


def solve_tridiagonal(sys: TridiagonalSystem, rhs: np.ndarray) -> np.ndarray:
    """Thomas algorithm: O(n), no pivoting.

    Raises ``ZeroDivisionError`` on a zero pivot, which cannot happen for a
    strictly diagonally dominant matrix.
    """
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if rhs.shape != (sys.size,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({sys.size},)")
    out = np.empty(sys.size)
    lower = np.ascontiguousarray(sys.lower, dtype=float)
    diag = np.ascontiguousarray(sys.diag, dtype=float)
    upper = np.ascontiguousarray(sys.upper, dtype=float)
    if _thomas(lower, diag, upper, rhs, out):
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    return out


def mass_apply_interior(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Rows of M u for the interior nodes, using the full nodal vector."""
    u = np.asarray(u, dtype=float)
    return grid.h / 6.0 * (u[:-2] + 4.0 * u[1:-1] + u[2:])


def stiffness_apply_interior(u: np.ndarray, grid: Grid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return (-u[:-2] + 2.0 * u[1:-1] - u[2:]) / grid.h


def gradient_p1_to_p0(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Cellwise derivative of the P1 interpolant."""
    u = np.asarray(u, dtype=float)
    if u.size != grid.n_cells + 1:
        raise ValueError(f"expected {grid.n_cells + 1} nodal values, got {u.size}")
    return np.diff(u) / grid.h


def stress_divergence_rhs(tau: np.ndarray, grid: Grid) -> np.ndarray:
    """Interior load of the weak stress divergence: ``tau[i] - tau[i-1]`` at node i.

    Obtained from ``-int tau phi_i'`` with P0 stress; the boundary hat
    functions carry no equation.
    """
    tau = np.asarray(tau, dtype=float)
    if tau.size != grid.n_cells:
        raise ValueError(f"expected {grid.n_cells} cell values, got {tau.size}")
    return np.diff(tau)


def dirichlet_correction(p: Parameters, grid: Grid, dt: float, left: float, right: float) -> np.ndarray:
    """Right-hand-side correction for eliminated boundary unknowns."""
    c = off_diagonal_coefficient(p, grid, dt)
    corr = np.zeros(grid.n_cells - 1)
    corr[0] -= c * left
    corr[-1] -= c * right
    return corr
