"""Semi-discrete Legendre-Galerkin system  M a'' = A a + b(t).

Both stiffness blocks are stored positive and combined as A = rho (A1 - A2):

    (A1)_kj = sum_l sum_m w_l w_m L_k(x_l) J(x_l - x_m) L_j(x_m)
    (A2)_kj = sum_l w_l L_k(x_l) L_j(x_l) c(x_l),   c(x_l) = sum_m w_m J(x_l - x_m)

In ``"unitMass"`` mode the kernel mass c is taken to be 1, which turns A2 into
the mass matrix.  ``"exactMass"`` keeps c and, because A1 and A2 share one
rule, the discrete operator annihilates constants and is negative
semi-definite up to round-off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import basis
from .basis import QuadratureRule
from .errors import RuleTooCoarse
from .kernel import KernelSpec, kernel_eval

A2_MODES = ("exactMass", "unitMass")

Forcing = Callable[[np.ndarray, float], np.ndarray]


def mass_diagonal(N: int) -> np.ndarray:
    """Legendre norms 2/(2k+1), k = 0..N."""
    if N < 0:
        raise ValueError("degree must be nonnegative")
    return 2.0 / (2.0 * np.arange(N + 1) + 1.0)


def default_rule(spec: KernelSpec, N: int, lo: float = -1.0, hi: float = 1.0,
                 points: int | None = None, panels: int | None = None) -> QuadratureRule:
    """Assembly rule resolving both the degree-2N products and the kernel width.

    Panels are at most 8 kernel widths wide and each carries max(N + 1, 16)
    Gauss points, so every panel is exact for the Gram products and the
    Gaussian is sampled finely enough for ~1e-14 accuracy.  At least 64 points
    are used overall.  ``points`` (per panel) and ``panels`` override.
    """
    if panels is None:
        panels = max(1, math.ceil((hi - lo) / (8.0 * spec.delta)))
    if points is None:
        points = max(N + 1, 16, math.ceil(64 / panels))
    return basis.composite_gauss_rule(lo, hi, panels, points)


def _check_rule(N: int, rule: QuadratureRule):
    if len(rule) < N + 1:
        raise RuleTooCoarse(f"rule has {len(rule)} points but degree {N} needs at least {N + 1}")


def _weighted_basis(N: int, rule: QuadratureRule):
    xi, _ = rule.reference()
    phi = basis.legendre_eval_all(N, xi)
    return phi, phi * rule.weights


def kernel_matrix(spec: KernelSpec, rule: QuadratureRule) -> np.ndarray:
    x = rule.nodes
    return kernel_eval(spec, x[:, None] - x[None, :])


def _a1(C: np.ndarray, J: np.ndarray) -> np.ndarray:
    A1 = C @ (J @ C.T)
    return 0.5 * (A1 + A1.T)


def _a2_exact(phi: np.ndarray, C: np.ndarray, J: np.ndarray, w: np.ndarray) -> np.ndarray:
    c = J @ w
    A2 = (C * c) @ phi.T
    return 0.5 * (A2 + A2.T)


def assemble_A1(spec: KernelSpec, N: int, rule: QuadratureRule) -> np.ndarray:
    _check_rule(N, rule)
    _, C = _weighted_basis(N, rule)
    return _a1(C, kernel_matrix(spec, rule))


def assemble_A2(mode: str, spec: KernelSpec, N: int, rule: QuadratureRule) -> np.ndarray:
    _check_rule(N, rule)
    if mode == "unitMass":
        half = 0.5 * (rule.interval[1] - rule.interval[0])
        return np.diag(half * mass_diagonal(N))
    if mode != "exactMass":
        raise ValueError(f"unknown a2 mode {mode!r}; expected one of {A2_MODES}")
    phi, C = _weighted_basis(N, rule)
    return _a2_exact(phi, C, kernel_matrix(spec, rule), rule.weights)


def assemble_load(g: Forcing | None, t: float, N: int, rule: QuadratureRule) -> np.ndarray:
    """b_k(t) = sum_l w_l g(x_l, t) L_k(x_l)."""
    _, C = _weighted_basis(N, rule)
    if g is None:
        return np.zeros(N + 1)
    return C @ np.broadcast_to(g(rule.nodes, t), rule.nodes.shape)


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    kernel: KernelSpec
    N: int
    rho: float
    mass_diag: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    rule: QuadratureRule
    a2_mode: str
    forcing: Forcing | None = None
    _C: np.ndarray = field(default=None, repr=False)

    @property
    def domain(self) -> tuple[float, float]:
        return self.rule.interval

    @property
    def A(self) -> np.ndarray:
        return self.rho * (self.A1 - self.A2)

    @property
    def mass(self) -> np.ndarray:
        return self.mass_diag

    def load(self, t: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(self.N + 1)
        return self._C @ np.broadcast_to(self.forcing(self.rule.nodes, t), self.rule.nodes.shape)

    def project(self, f) -> np.ndarray:
        return basis.project(f, self.N, self.rule)

    def synthesize(self, a, xs) -> np.ndarray:
        return basis.synthesize(a, xs, self.domain)

    def with_rho(self, rho: float) -> "AssembledSystem":
        return AssembledSystem(self.kernel, self.N, rho, self.mass_diag, self.A1, self.A2,
                               self.rule, self.a2_mode, self.forcing, self._C)


def build_system(spec: KernelSpec, N: int, rho: float = 1.0, g: Forcing | None = None,
                 mode: str = "exactMass", rule: QuadratureRule | None = None,
                 domain: tuple[float, float] = (-1.0, 1.0)) -> AssembledSystem:
    """Assemble mass, stiffness blocks and load evaluator on ``domain``.

    ``g(x, t)`` must accept an array of physical points.  The rule defaults to
    :func:`default_rule`; when given, its interval defines the domain.
    """
    if mode not in A2_MODES:
        raise ValueError(f"unknown a2 mode {mode!r}; expected one of {A2_MODES}")
    if not rho >= 0:
        raise ValueError("rho must be nonnegative")
    if rule is None:
        rule = default_rule(spec, N, *domain)
    _check_rule(N, rule)
    phi, C = _weighted_basis(N, rule)
    J = kernel_matrix(spec, rule)
    A1 = _a1(C, J)
    half = 0.5 * (rule.interval[1] - rule.interval[0])
    mass = half * mass_diagonal(N)
    if mode == "exactMass":
        A2 = _a2_exact(phi, C, J, rule.weights)
    else:
        A2 = np.diag(mass)
    for arr in (mass, A1, A2, C):
        arr.setflags(write=False)
    return AssembledSystem(spec, N, float(rho), mass, A1, A2, rule, mode, g, C)
