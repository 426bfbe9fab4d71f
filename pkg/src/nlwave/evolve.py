"""Two-level time stepping for  M a'' = A a + b(t).

Three central-difference variants share one driver:

``paperImplicit``
    (I - dt^2 M^-1 A) a^{j+1} = 2 a^j - a^{j-1} + dt^2 M^-1 b(t_j)
``explicitCentral``
    a^{j+1} = 2 a^j - a^{j-1} + dt^2 (M^-1 A a^j + M^-1 b(t_j))
``averagedImplicit``
    (I - dt^2/2 M^-1 A) a^{j+1} = 2 a^j - a^{j-1} + dt^2/2 M^-1 A a^{j-1} + dt^2 M^-1 b(t_j)

Any object with ``mass`` (diagonal, 1-D), ``A``, ``load(t)``, ``project(f)``
and ``synthesize(a, xs)`` can be integrated; the Galerkin system and the
nodal collocation system both qualify.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import MisalignedSnapshot, SingularSystem

SCHEMES = ("paperImplicit", "explicitCentral", "averagedImplicit")
PIVOT_TOL = 1e-14
ALIGN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EvolutionState:
    j: int
    a_prev: np.ndarray
    a_curr: np.ndarray
    dt: float
    scheme: str

    @property
    def t(self) -> float:
        return self.j * self.dt


@dataclass(frozen=True)
class Snapshot:
    t: float
    xs: np.ndarray
    us: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        if np.shape(self.xs)[0] != np.shape(self.us)[0]:
            raise ValueError("sample grid and values differ in length")


def _check_scheme(scheme: str):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _velocity(system, v0):
    if v0 is None:
        return np.zeros_like(system.mass)
    return system.project(v0)


class Integrator:
    """Steps one system with a fixed dt; the implicit matrix is factored once."""

    def __init__(self, system, dt: float, scheme: str = "paperImplicit"):
        _check_scheme(scheme)
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.system = system
        self.dt = float(dt)
        self.scheme = scheme
        self.minv = 1.0 / np.asarray(system.mass, dtype=float)
        self.op = self.minv[:, None] * np.asarray(system.A)
        self._lu = None
        if scheme != "explicitCentral":
            c = dt * dt if scheme == "paperImplicit" else 0.5 * dt * dt
            lhs = np.eye(self.op.shape[0]) - c * self.op
            with warnings.catch_warnings():
                # a singular factor is reported below as SingularSystem
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(lhs, check_finite=True)
            if np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
                raise SingularSystem(f"implicit matrix has a pivot below {PIVOT_TOL:g} (dt={dt:g})")
            self._lu = (lu, piv)

    def forcing(self, t: float) -> np.ndarray:
        return self.minv * self.system.load(t)

    def step(self, state: EvolutionState) -> EvolutionState:
        dt2 = self.dt * self.dt
        a0, a1 = state.a_prev, state.a_curr
        rhs = 2.0 * a1 - a0 + dt2 * self.forcing(state.t)
        if self.scheme == "explicitCentral":
            a2 = rhs + dt2 * (self.op @ a1)
        else:
            if self.scheme == "averagedImplicit":
                rhs = rhs + 0.5 * dt2 * (self.op @ a0)
            a2 = scipy.linalg.lu_solve(self._lu, rhs, check_finite=False)
        return EvolutionState(state.j + 1, a1, a2, state.dt, state.scheme)

    def start(self, u0, v0=None) -> EvolutionState:
        """Project the data and take the Taylor start-up step to j = 1."""
        a0 = self.system.project(u0)
        adot = _velocity(self.system, v0)
        accel = self.op @ a0 + self.forcing(0.0)
        a1 = a0 + self.dt * adot + 0.5 * self.dt * self.dt * accel
        return EvolutionState(1, a0, a1, self.dt, self.scheme)


def init_state(system, u0, v0, dt: float, scheme: str = "paperImplicit") -> EvolutionState:
    return Integrator(system, dt, scheme).start(u0, v0)


def step(state: EvolutionState, system) -> EvolutionState:
    """One step; factors the implicit matrix on every call, use :class:`Integrator` in loops."""
    return Integrator(system, state.dt, state.scheme).step(state)


def _step_index(t: float, dt: float, what: str) -> int:
    j = round(t / dt)
    if abs(j * dt - t) > ALIGN_TOL:
        raise MisalignedSnapshot(f"{what} {t!r} is not a multiple of dt={dt!r}")
    return j


def snapshot_steps(snapshot_times, T: float, dt: float) -> tuple[int, set[int]]:
    """Step count for [0, T] and the step indices of the requested times."""
    if not T >= 0:
        raise ValueError("T must be nonnegative")
    n_steps = _step_index(T, dt, "final time")
    if snapshot_times is None:
        snapshot_times = [0.0, T] if T > 0 else [0.0]
    wanted = set()
    for t in snapshot_times:
        if t < -ALIGN_TOL or t > T + ALIGN_TOL:
            raise MisalignedSnapshot(f"snapshot time {t!r} outside [0, {T!r}]")
        wanted.add(_step_index(t, dt, "snapshot time"))
    return n_steps, wanted


def run(system, u0, v0, dt: float, T: float, sample_grid, snapshot_times: Sequence[float] | None = None,
        scheme: str = "paperImplicit", weights=None, callback: Callable | None = None) -> list[Snapshot]:
    """Integrate from 0 to T and synthesize the solution on ``sample_grid``.

    ``snapshot_times`` defaults to ``[0, T]``; every entry must lie in [0, T]
    on the step lattice.  ``callback(state)`` is invoked after every step.
    """
    integ = Integrator(system, dt, scheme)
    n_steps, wanted = snapshot_steps(snapshot_times, T, dt)
    xs = np.asarray(sample_grid, dtype=float)
    state = integ.start(u0, v0)
    out = []

    def emit(j, a):
        if j in wanted:
            out.append(Snapshot(j * dt, xs, system.synthesize(a, xs), weights))

    emit(0, state.a_prev)
    if n_steps >= 1:
        emit(1, state.a_curr)
    while state.j < n_steps:
        state = integ.step(state)
        if callback is not None:
            callback(state)
        emit(state.j, state.a_curr)
    return out


def companion_matrix(system, dt: float, scheme: str = "paperImplicit") -> np.ndarray:
    """One-step map (a^{j+1}, a^j) <- (a^j, a^{j-1}) of the homogeneous recurrence."""
    _check_scheme(scheme)
    op = np.asarray(system.A) / np.asarray(system.mass)[:, None]
    n = op.shape[0]
    eye = np.eye(n)
    dt2 = dt * dt
    if scheme == "explicitCentral":
        top = np.hstack([2.0 * eye + dt2 * op, -eye])
    elif scheme == "paperImplicit":
        S = np.linalg.solve(eye - dt2 * op, eye)
        top = np.hstack([2.0 * S, -S])
    else:
        S = np.linalg.solve(eye - 0.5 * dt2 * op, eye)
        top = np.hstack([2.0 * S, S @ (0.5 * dt2 * op - eye)])
    bottom = np.hstack([eye, np.zeros((n, n))])
    return np.vstack([top, bottom])


def modal_multipliers(system, dt: float, scheme: str = "paperImplicit", zero_tol: float = 1e-12):
    """Moduli of the companion eigenvalues, computed mode by mode.

    M^-1 A is similar to the symmetric M^-1/2 A M^-1/2 with eigenvalues mu, and
    each mu contributes the two roots of the scheme's characteristic quadratic.
    Eigenvalues within ``zero_tol`` (relative to the largest |mu|) of zero are
    treated as exact zeros; their round-off sign would otherwise split the
    double root at z = 1 by O(dt sqrt(eps)).
    """
    _check_scheme(scheme)
    m = np.sqrt(np.asarray(system.mass, dtype=float))
    B = np.asarray(system.A) / np.outer(m, m)
    mu = np.linalg.eigvalsh(0.5 * (B + B.T))
    scale = max(1.0, float(np.max(np.abs(mu))))
    mu = np.where(np.abs(mu) <= zero_tol * scale, 0.0, mu)
    x = dt * dt * mu
    if scheme == "paperImplicit":
        a, b, c = 1.0 - x, -2.0 * np.ones_like(x), np.ones_like(x)
    elif scheme == "explicitCentral":
        a, b, c = np.ones_like(x), -(2.0 + x), np.ones_like(x)
    else:
        a, b, c = 1.0 - 0.5 * x, -2.0 * np.ones_like(x), 1.0 - 0.5 * x
    disc = np.sqrt((b * b - 4.0 * a * c).astype(complex))
    roots = np.concatenate([(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)])
    return np.abs(roots), mu


@dataclass(frozen=True)
class PowerResult:
    value: float
    residual: float
    iterations: int
    converged: bool


def power_iteration(C: np.ndarray, tol: float = 1e-10, maxiter: int = 100_000,
                    block: int = 25, seed: int = 0) -> PowerResult:
    """Dominant eigenvalue modulus of ``C`` by power iteration.

    Iterates with P = C^block and, after every block, fits both
    x_{k+1} = theta x_k (real dominant eigenvalue) and
    x_{k+2} = alpha x_{k+1} + beta x_k (complex pair or 2x2 Jordan block)
    and stops once a relative residual falls below ``tol``.  The modulus of
    C is the block-th root of the fitted one.  On exhaustion the best estimate
    seen is returned with ``converged=False``.
    """
    rng = np.random.default_rng(seed)
    P = np.linalg.matrix_power(C, block)
    x = rng.standard_normal(C.shape[0])
    x /= np.linalg.norm(x)
    best = PowerResult(float("nan"), float("inf"), 0, False)
    for k in range(1, maxiter // block + 1):
        y = P @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return PowerResult(0.0, 0.0, k * block, True)
        z = P @ y
        theta = float(x @ y)
        cand = [(np.linalg.norm(y - theta * x) / ny, abs(theta))]
        pair = np.column_stack([y, x])
        coef, *_ = np.linalg.lstsq(pair, z, rcond=None)
        nz = np.linalg.norm(z)
        if nz > 0.0:
            r2 = np.linalg.norm(z - pair @ coef) / nz
            roots = np.abs(np.roots([1.0, -coef[0], -coef[1]]))
            # a double root is split by O(sqrt(residual)); the product of the
            # roots is the well-conditioned quantity for pairs and double roots
            if roots.max() - roots.min() <= 100.0 * np.sqrt(r2) * roots.max():
                modulus = float(np.sqrt(abs(coef[1])))
            else:
                modulus = float(roots.max())
            cand.append((r2, modulus))
        # prefer the pair fit: it also covers a Jordan block, where theta creeps like 1 + 1/k
        r, val = cand[-1] if cand[-1][0] < tol else min(cand)
        est = PowerResult(val ** (1.0 / block), float(r), k * block, bool(r < tol))
        if r < best.residual:
            best = est
        if est.converged:
            return est
        x = y / ny
    return best


@dataclass(frozen=True)
class RadiusReport:
    scheme: str
    dt: float
    radius: float
    power_estimate: float
    power_residual: float
    power_converged: bool

    def __float__(self):
        return self.radius


def spectral_radius_report(system, dt: float, scheme: str = "paperImplicit",
                           power: bool = True, maxiter: int = 100_000) -> RadiusReport:
    """Spectral radius of the one-step companion matrix.

    ``radius`` comes from the modal decomposition; the power-iteration estimate
    on the assembled companion matrix is carried alongside with its residual
    and convergence flag.  For small dt the companion spectrum clusters on the
    unit circle and power iteration typically stalls, hence the modal value is
    the one to trust.
    """
    moduli, _ = modal_multipliers(system, dt, scheme)
    radius = float(np.max(moduli))
    if power:
        res = power_iteration(companion_matrix(system, dt, scheme), maxiter=maxiter)
    else:
        res = PowerResult(float("nan"), float("nan"), 0, False)
    return RadiusReport(scheme, float(dt), radius, res.value, res.residual, res.converged)
