"""Nodal quadrature (collocation) discretization of the nonlocal operator.

At every grid point x_k the integral is replaced by the weighted sum over the
grid itself,

    (D u)_k = rho sum_i w_i J(x_k - x_i) (u_i - u_k),

so the rows of D sum to zero and W D is symmetric.  The 1-D solver reuses the
time integrators of :mod:`nlwave.evolve`; the 2-D periodic midpoint solver
uses semi-implicit Euler on the unit torus.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import evolve
from .basis import QuadratureRule, composite_gauss_rule, gauss_rule
from .errors import GridMismatch
from .evolve import Snapshot
from .kernel import KernelSpec, kernel_eval

STRUCTURES = ("singleGauss", "compositeGauss", "uniformMidpoint")


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Quadrature points and weights; ``points`` has shape (M,) in 1-D and (M, 2) in 2-D."""

    points: np.ndarray
    weights: np.ndarray
    structure: str
    domain: tuple
    periodic: bool = False
    params: tuple = ()

    @property
    def dim(self) -> int:
        return 1 if np.ndim(self.points) == 1 else self.points.shape[1]

    def __len__(self):
        return len(self.weights)

    def rule(self) -> QuadratureRule:
        return QuadratureRule(self.points, self.weights, self.domain)


def _from_rule(rule: QuadratureRule, structure: str, params) -> CollocationGrid:
    return CollocationGrid(np.array(rule.nodes), np.array(rule.weights), structure, rule.interval, False, params)


def gauss_grid(lo: float, hi: float, M: int) -> CollocationGrid:
    return _from_rule(gauss_rule(M, lo, hi), "singleGauss", (M,))


def composite_grid(lo: float, hi: float, N_h: int, K: int) -> CollocationGrid:
    """N_h equal subdomains, each carrying a K-point Gauss rule."""
    if N_h < 1 or K < 1:
        raise ValueError("N_h and K must be positive")
    return _from_rule(composite_gauss_rule(lo, hi, N_h, K), "compositeGauss", (N_h, K))


def midpoint_grid(lo: float, hi: float, n: int, periodic: bool = False) -> CollocationGrid:
    if n < 1:
        raise ValueError("need at least one cell")
    h = (hi - lo) / n
    x = lo + h * (np.arange(n) + 0.5)
    return CollocationGrid(x, np.full(n, h), "uniformMidpoint", (lo, hi), periodic, (n,))


def midpoint_grid_2d(n: int) -> CollocationGrid:
    """Cell centres of an n x n grid on the unit torus, x index major."""
    if n < 1:
        raise ValueError("need at least one cell")
    h = 1.0 / n
    c = h * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(c, c, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return CollocationGrid(pts, np.full(n * n, h * h), "uniformMidpoint", ((0.0, 1.0), (0.0, 1.0)), True, (n,))


def _check_periodic_kernel(spec: KernelSpec, grid: CollocationGrid):
    if not grid.periodic:
        return
    if grid.dim == 1:
        length = grid.domain[1] - grid.domain[0]
    else:
        length = 1.0
    if not spec.periodic or not np.isclose(spec.period, length, rtol=0, atol=1e-14):
        raise GridMismatch(f"periodic grid of length {length} needs a kernel periodized with that period")


def _pair_kernel(spec: KernelSpec, grid: CollocationGrid) -> np.ndarray:
    P = grid.points
    if grid.dim == 1:
        return kernel_eval(spec, P[:, None] - P[None, :])
    # isotropic Gaussian: the 2-D kernel and its lattice periodization factor by axis
    Jx = kernel_eval(spec, P[:, None, 0] - P[None, :, 0])
    Jy = kernel_eval(spec, P[:, None, 1] - P[None, :, 1])
    return Jx * Jy


def assemble_collocation(spec: KernelSpec, grid: CollocationGrid, rho: float) -> np.ndarray:
    """D_ki = rho w_i J(x_k - x_i) off the diagonal, rows summing to zero."""
    _check_periodic_kernel(spec, grid)
    D = rho * _pair_kernel(spec, grid) * grid.weights[None, :]
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


class NodalSystem:
    """Collocation ODE system u'' = D u + g in the form expected by :mod:`nlwave.evolve`.

    The mass is W = diag(w) and the stiffness W D, which is symmetric; this
    leaves M^-1 A = D and lets the modal stability analysis apply unchanged.
    """

    def __init__(self, spec: KernelSpec, grid: CollocationGrid, rho: float, g: Callable | None = None):
        self.kernel = spec
        self.grid = grid
        self.rho = float(rho)
        self.forcing = g
        self.D = assemble_collocation(spec, grid, rho)
        self.mass = np.asarray(grid.weights, dtype=float)
        A = self.mass[:, None] * self.D
        self.A = 0.5 * (A + A.T)

    def load(self, t: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(len(self.grid))
        return self.mass * np.broadcast_to(self.forcing(self.grid.points, t), self.mass.shape)

    def project(self, f) -> np.ndarray:
        if f is None:
            return np.zeros(len(self.grid))
        vals = f(self.grid.points) if callable(f) else f
        return np.array(np.broadcast_to(vals, self.mass.shape), dtype=float)

    def synthesize(self, a, xs) -> np.ndarray:
        if np.shape(xs) != np.shape(self.grid.points) or not np.array_equal(xs, self.grid.points):
            raise GridMismatch("collocation values are only available at the grid points")
        return np.array(a, dtype=float)


def run_collocation_1d(spec: KernelSpec, grid: CollocationGrid, rho: float, g, u0, v0, dt: float,
                       T: float, scheme: str = "paperImplicit",
                       snapshot_times: Sequence[float] | None = None) -> list[Snapshot]:
    """Integrate u'' = D u + g at the nodes; snapshots hold nodal values."""
    if grid.dim != 1:
        raise ValueError("run_collocation_1d needs a 1-D grid")
    system = NodalSystem(spec, grid, rho, g)
    return evolve.run(system, u0, v0, dt, T, grid.points, snapshot_times, scheme, weights=grid.weights)


@dataclass(frozen=True, eq=False)
class FieldState:
    u: np.ndarray
    v: np.ndarray
    j: int
    dt: float

    @property
    def t(self) -> float:
        return self.j * self.dt


def run_midpoint_2d(spec: KernelSpec, n: int, rho: float, u0, v0=None, dt: float = 0.1, T: float = 1.0,
                    g=None, snapshot_times: Sequence[float] | None = None,
                    callback: Callable | None = None) -> list[Snapshot]:
    """Midpoint-rule solver on the periodic unit square.

    Time stepping is semi-implicit Euler,
    v^{j+1} = v^j + dt (D u^j + g),  u^{j+1} = u^j + dt v^{j+1}.
    ``u0``, ``v0`` and ``g`` take an (M, 2) array of points (``g`` also t).
    """
    if n < 4:
        raise ValueError("need n >= 4 cells per side")
    if not dt > 0:
        raise ValueError("dt must be positive")
    grid = midpoint_grid_2d(n)
    D = assemble_collocation(spec, grid, rho)
    pts = grid.points
    u = np.array(np.broadcast_to(u0(pts) if callable(u0) else u0, (len(grid),)), dtype=float)
    v = np.zeros_like(u) if v0 is None else np.array(np.broadcast_to(v0(pts) if callable(v0) else v0, u.shape), dtype=float)
    n_steps, wanted = evolve.snapshot_steps(snapshot_times, T, dt)
    state = FieldState(u, v, 0, dt)
    out = [Snapshot(0.0, pts, u.copy(), grid.weights)] if 0 in wanted else []
    for j in range(n_steps):
        acc = D @ state.u
        if g is not None:
            acc = acc + g(pts, state.t)
        v = state.v + dt * acc
        u = state.u + dt * v
        state = FieldState(u, v, j + 1, dt)
        if callback is not None:
            callback(state)
        if state.j in wanted:
            out.append(Snapshot(state.j * dt, pts, u.copy(), grid.weights))
    return out
