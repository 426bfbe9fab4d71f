"""Verification harness: Taylor moments, local wave reference, manufactured
solutions, error norms and operator bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import basis, evolve
from .assembly import AssembledSystem, build_system, default_rule
from .basis import QuadratureRule, composite_gauss_rule
from .errors import CflViolation, GridMismatch
from .evolve import Snapshot
from .kernel import KernelSpec, kernel_eval, truncation_radius

ORDER_FIT_FLOOR = 5e-11


# --- Taylor moments -------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    """C_{2m} = rho/(2m)! int z^{2m} J(z) dz for m = 1..m_max, plus the odd moments as a check."""

    coefficients: np.ndarray
    odd_moments: np.ndarray
    rho: float
    kernel: KernelSpec

    @property
    def C2(self) -> float:
        return float(self.coefficients[0])

    def __getitem__(self, two_m: int) -> float:
        if two_m % 2 or two_m < 2:
            raise KeyError(two_m)
        return float(self.coefficients[two_m // 2 - 1])


def gaussian_moment(spec: KernelSpec, m: int) -> float:
    """int z^{2m} J(z) dz = sigma^{2m} (2m-1)!! with sigma^2 = 1/(2s)."""
    sigma2 = 1.0 / (2.0 * spec.s)
    return sigma2 ** m * math.prod(range(1, 2 * m, 2))


def taylor_coefficients(spec: KernelSpec, rho: float, m_max: int) -> MomentTable:
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    A = truncation_radius(spec.delta, 1e-15)
    rule = composite_gauss_rule(-A, A, 32, 20)
    J = kernel_eval(KernelSpec(spec.s), rule.nodes) * rule.weights
    z = rule.nodes
    even = np.array([rho / math.factorial(2 * m) * np.dot(J, z ** (2 * m)) for m in range(1, m_max + 1)])
    odd = np.array([np.dot(J, z ** (2 * m - 1)) for m in range(1, m_max + 1)])
    return MomentTable(even, odd, float(rho), spec)


# --- local wave reference -------------------------------------------------

def local_reference(C2: float, u0, g, lo: float, hi: float, T: float, nx: int, dt: float,
                    v0=None, snapshot_times: Sequence[float] | None = None) -> list[Snapshot]:
    """Central differences for u_tt = C2 u_xx + g with reflecting (zero-flux) ends.

    ``nx`` grid points include both endpoints; ghost values mirror the first
    interior point.  Start-up uses the same Taylor step as the Galerkin path.
    """
    if C2 < 0:
        raise ValueError("C2 must be nonnegative")
    if nx < 3:
        raise ValueError("need at least three grid points")
    x = np.linspace(lo, hi, nx)
    h = x[1] - x[0]
    if math.sqrt(C2) * dt / h > 1.0:
        raise CflViolation(f"sqrt(C2) dt / h = {math.sqrt(C2) * dt / h:.3g} exceeds 1")
    n_steps, wanted = evolve.snapshot_steps(snapshot_times, T, dt)
    weights = np.full(nx, h)
    weights[[0, -1]] = 0.5 * h

    def lap(u):
        out = np.empty_like(u)
        out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
        out[0] = 2.0 * (u[1] - u[0])
        out[-1] = 2.0 * (u[-2] - u[-1])
        return out / (h * h)

    def force(t):
        return np.zeros(nx) if g is None else np.broadcast_to(g(x, t), x.shape)

    u_prev = np.array(np.broadcast_to(u0(x), x.shape), dtype=float)
    vel = np.zeros(nx) if v0 is None else np.broadcast_to(v0(x), x.shape)
    u_curr = u_prev + dt * vel + 0.5 * dt * dt * (C2 * lap(u_prev) + force(0.0))
    out = []
    if 0 in wanted:
        out.append(Snapshot(0.0, x, u_prev.copy(), weights))
    if n_steps >= 1 and 1 in wanted:
        out.append(Snapshot(dt, x, u_curr.copy(), weights))
    for j in range(1, n_steps):
        u_next = 2.0 * u_curr - u_prev + dt * dt * (C2 * lap(u_curr) + force(j * dt))
        u_prev, u_curr = u_curr, u_next
        if j + 1 in wanted:
            out.append(Snapshot((j + 1) * dt, x, u_curr.copy(), weights))
    return out


# --- error norms ------------------------------------------------------------

def trapezoid_weights(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.size == 1:
        return np.ones(1)
    dx = np.diff(xs)
    w = np.zeros_like(xs)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


def error_norms(snapshot: Snapshot, reference) -> tuple[float, float]:
    """(L2, Linf) difference between ``snapshot`` and a function or another snapshot.

    L2 uses the snapshot's quadrature weights when present, else the
    trapezoid rule on its sample grid.
    """
    xs = np.asarray(snapshot.xs)
    if isinstance(reference, Snapshot):
        if np.shape(reference.xs) != xs.shape or not np.allclose(reference.xs, xs, rtol=0, atol=1e-14):
            raise GridMismatch("snapshots live on different grids")
        ref = np.asarray(reference.us)
    else:
        ref = np.broadcast_to(reference(xs), np.shape(snapshot.us))
    diff = np.asarray(snapshot.us) - ref
    w = snapshot.weights if snapshot.weights is not None else trapezoid_weights(xs)
    return float(np.sqrt(np.dot(w, diff * diff))), float(np.max(np.abs(diff)))


# --- manufactured solutions -------------------------------------------------

@dataclass(frozen=True)
class ManufacturedSolution:
    name: str
    u: Callable[[np.ndarray, float], np.ndarray]
    u_t: Callable[[np.ndarray, float], np.ndarray]
    u_tt: Callable[[np.ndarray, float], np.ndarray]


def gauss_cos_solution(a: float = 9.0) -> ManufacturedSolution:
    """u*(x, t) = exp(-a x^2) cos t."""
    return ManufacturedSolution(
        "gaussCos",
        lambda x, t: np.exp(-a * np.square(x)) * np.cos(t),
        lambda x, t: -np.exp(-a * np.square(x)) * np.sin(t),
        lambda x, t: -np.exp(-a * np.square(x)) * np.cos(t),
    )


def polynomial_solution(coeffs: Sequence[float] = (0.3, -0.2, 0.5, 0.1, -0.4),
                        time_coeffs: Sequence[float] = (1.0, 0.5, -0.25)) -> ManufacturedSolution:
    """u*(x, t) = p(x) q(t) with p a Legendre series and q a quadratic."""
    p = np.asarray(coeffs, dtype=float)
    c0, c1, c2 = time_coeffs
    px = lambda x: basis.synthesize(p, x)  # noqa: E731
    return ManufacturedSolution(
        "polynomial",
        lambda x, t: px(x) * (c0 + c1 * t + c2 * t * t),
        lambda x, t: px(x) * (c1 + 2.0 * c2 * t),
        lambda x, t: px(x) * (2.0 * c2) * np.ones_like(t),
    )


MANUFACTURED = {"gaussCos": gauss_cos_solution, "polynomial": polynomial_solution}


class ManufacturedForcing:
    """g = u*_tt - rho L u*, with L u* evaluated on a finer reference rule.

    Kernel matrices are cached per evaluation grid, so repeated calls on the
    assembly nodes cost one matrix-vector product.
    """

    def __init__(self, solution: ManufacturedSolution, spec: KernelSpec, rho: float,
                 reference_rule: QuadratureRule):
        self.solution = solution
        self.spec = spec
        self.rho = float(rho)
        self.rule = reference_rule
        self._cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}

    def _weights_for(self, x: np.ndarray):
        key = x.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            K = kernel_eval(self.spec, x[:, None] - self.rule.nodes[None, :]) * self.rule.weights
            hit = (K, K.sum(axis=1))
            self._cache[key] = hit
        return hit

    def operator(self, x, t: float) -> np.ndarray:
        """L u*(x, t) on the reference rule."""
        x = np.ascontiguousarray(x, dtype=float)
        K, c = self._weights_for(x)
        return K @ self.solution.u(self.rule.nodes, t) - c * self.solution.u(x, t)

    def __call__(self, x, t: float) -> np.ndarray:
        return self.solution.u_tt(x, t) - self.rho * self.operator(x, t)


@dataclass
class ConvergenceReport:
    axis: str
    resolutions: list
    err_l2: list
    err_linf: list
    err_accel_l2: list = field(default_factory=list)
    fitted_order: float | None = None

    def rows(self):
        for r, e2, ei in zip(self.resolutions, self.err_l2, self.err_linf):
            yield self.axis, r, e2, ei


def fit_order(resolutions: Sequence[float], errors: Sequence[float], floor: float = ORDER_FIT_FLOOR) -> float:
    """Least-squares slope of log(error) against log(resolution), skipping errors below ``floor``."""
    r = np.asarray(resolutions, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e >= floor
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(r[keep]), np.log(e[keep]), 1)
    return float(slope)


def _measure(system: AssembledSystem, a_final: np.ndarray, sol: ManufacturedSolution,
             T: float, l2_rule: QuadratureRule, linf_grid: np.ndarray):
    uN = system.synthesize(a_final, l2_rule.nodes)
    e = uN - sol.u(l2_rule.nodes, T)
    l2 = float(np.sqrt(np.dot(l2_rule.weights, e * e)))
    linf = float(np.max(np.abs(system.synthesize(a_final, linf_grid) - sol.u(linf_grid, T))))
    # semi-discrete acceleration of the computed coefficients
    acc = (system.A @ a_final + system.load(T)) / system.mass
    ea = system.synthesize(acc, l2_rule.nodes) - sol.u_tt(l2_rule.nodes, T)
    return l2, linf, float(np.sqrt(np.dot(l2_rule.weights, ea * ea)))


def solve_manufactured(sol: ManufacturedSolution, spec: KernelSpec, rho: float, N: int, dt: float,
                       T: float, scheme: str, domain=(-1.0, 1.0), mode: str = "exactMass",
                       rule: QuadratureRule | None = None):
    """Galerkin solve of the manufactured problem; returns (system, final coefficients)."""
    rule = rule or default_rule(spec, N, *domain)
    ref_rule = composite_gauss_rule(*rule.interval, 4 * rule.panels, len(rule) // rule.panels)
    forcing = ManufacturedForcing(sol, spec, rho, ref_rule)
    system = build_system(spec, N, rho, forcing, mode, rule)
    integ = evolve.Integrator(system, dt, scheme)
    state = integ.start(lambda x: sol.u(x, 0.0), lambda x: sol.u_t(x, 0.0))
    n_steps = evolve._step_index(T, dt, "final time")
    if n_steps == 0:
        return system, state.a_prev
    while state.j < n_steps:
        state = integ.step(state)
    return system, state.a_curr


def manufactured_study(sol: ManufacturedSolution, spec: KernelSpec, rho: float, Ns: Sequence[int],
                       dts: Sequence[float], T: float, *, dt_spatial: float = 1e-4, N_temporal: int = 32,
                       spatial_scheme: str = "explicitCentral", temporal_scheme: str = "averagedImplicit",
                       domain=(-1.0, 1.0), mode: str = "exactMass") -> tuple[ConvergenceReport, ConvergenceReport]:
    """Spatial sweep over ``Ns`` at ``dt_spatial`` and temporal sweep over ``dts`` at ``N_temporal``.

    Errors are measured at t = T: L2 by a Gauss rule well beyond the
    largest degree, Linf on 401 equispaced points.  The temporal report
    carries the fitted order.
    """
    lo, hi = domain
    linf_grid = np.linspace(lo, hi, 401)
    l2_rule = composite_gauss_rule(lo, hi, 8, 2 * max(list(Ns) + [N_temporal]) + 8)
    spatial = ConvergenceReport("spatialN", [], [], [], [])
    for N in Ns:
        system, a = solve_manufactured(sol, spec, rho, N, dt_spatial, T, spatial_scheme, domain, mode)
        l2, linf, acc = _measure(system, a, sol, T, l2_rule, linf_grid)
        spatial.resolutions.append(int(N))
        spatial.err_l2.append(l2)
        spatial.err_linf.append(linf)
        spatial.err_accel_l2.append(acc)
    temporal = ConvergenceReport("temporalDt", [], [], [], [])
    for dt in dts:
        system, a = solve_manufactured(sol, spec, rho, N_temporal, dt, T, temporal_scheme, domain, mode)
        l2, linf, acc = _measure(system, a, sol, T, l2_rule, linf_grid)
        temporal.resolutions.append(float(dt))
        temporal.err_l2.append(l2)
        temporal.err_linf.append(linf)
        temporal.err_accel_l2.append(acc)
    temporal.fitted_order = fit_order(temporal.resolutions, temporal.err_l2)
    return spatial, temporal


# --- operator bounds --------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    K: float
    frobA1: float
    frobA2: float
    frobA: float
    frobM: float
    discreteOpNorm: float
    bound4NK: float
    bound4: float
    boundA: float
    violations: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "K": self.K, "frobA1": self.frobA1, "frobA2": self.frobA2, "frobA": self.frobA,
            "frobM": self.frobM, "discreteOpNorm": self.discreteOpNorm, "bound4NK": self.bound4NK,
            "bound4": self.bound4, "boundA": self.boundA, "violations": list(self.violations),
        }


def discrete_operator_norm(system: AssembledSystem) -> float:
    """||M^-1/2 (A1 - A2) M^-1/2||_2, the discrete L2 operator norm of the unscaled operator."""
    m = np.sqrt(system.mass)
    B = (system.A1 - system.A2) / np.outer(m, m)
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (B + B.T)))))


def bounds_report(system: AssembledSystem) -> BoundsReport:
    """Frobenius norms of the blocks against 4(N+1)K and 4, plus the operator norm against 2."""
    N = system.N
    K = float(np.max(kernel_eval(system.kernel, 0.0 * system.rule.nodes)))
    frobA1 = float(np.linalg.norm(system.A1, "fro"))
    frobA2 = float(np.linalg.norm(system.A2, "fro"))
    frobA = float(np.linalg.norm(system.A, "fro"))
    frobM = float(np.linalg.norm(system.mass))
    op = discrete_operator_norm(system)
    bound4NK = 4.0 * (N + 1) * K
    boundA = 4.0 * system.rho * ((N + 1) * K + 1.0)
    violations = []
    if frobA1 > bound4NK:
        violations.append("frobA1 > 4(N+1)K")
    if system.a2_mode == "unitMass" and not frobA2 < 4.0:
        violations.append("frobA2 >= 4")
    if frobA > boundA:
        violations.append("frobA > 4 rho ((N+1)K + 1)")
    if op > 2.0 + 1e-6:
        violations.append("discrete operator norm > 2")
    return BoundsReport(K, frobA1, frobA2, frobA, frobM, op, bound4NK, 4.0, boundA, tuple(violations))


def mass_norm_interval() -> tuple[float, float]:
    """Bounds 2 <= ||M||_F < sqrt(4 pi^2/6) valid for every N."""
    return 2.0, math.sqrt(4.0 + 4.0 * (math.pi ** 2 / 6.0 - 1.0))

