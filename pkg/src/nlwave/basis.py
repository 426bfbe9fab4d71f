"""Legendre polynomials, Gauss-Legendre rules and coefficient transforms.

The canonical basis lives on [-1, 1].  Functions on another interval are
handled by an affine map at the point where they are sampled, so a rule on
[lo, hi] can be used directly with :func:`project` and :func:`synthesize`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergence, RuleTooCoarse

NEWTON_TOL = 1e-15
NEWTON_MAXITER = 100


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule on ``interval``.

    ``panels`` records how many equal subintervals a composite rule uses.
    """

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    panels: int = 1

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        lo, hi = map(float, self.interval)
        if not lo < hi:
            raise ValueError(f"empty interval ({lo}, {hi})")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "interval", (lo, hi))

    def __len__(self):
        return self.nodes.size

    def integrate(self, f: Callable | np.ndarray) -> float:
        values = f(self.nodes) if callable(f) else f
        return float(np.dot(self.weights, values))

    def reference(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights pulled back to [-1, 1]."""
        lo, hi = self.interval
        half = 0.5 * (hi - lo)
        return (self.nodes - 0.5 * (lo + hi)) / half, self.weights / half


def to_reference(x, interval=(-1.0, 1.0)):
    lo, hi = interval
    if lo == -1.0 and hi == 1.0:
        return np.asarray(x, dtype=float)
    return (2.0 * np.asarray(x, dtype=float) - (lo + hi)) / (hi - lo)


def legendre_eval(n: int, x):
    """Evaluate L_n at ``x`` by the three-term recurrence.

    Points outside [-1, 1] are accepted; the result is then the polynomial's
    extrapolation, which grows like |x|^n.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev, p = np.ones_like(x), x.copy()
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p if p.ndim else float(p)


def legendre_eval_all(N: int, x) -> np.ndarray:
    """Values of L_0..L_N at ``x`` in one recurrence pass.

    Returns an array of shape ``(N + 1,) + np.shape(x)``.
    """
    if N < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = x
    for k in range(1, N):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _legendre_and_derivative(n: int, x: np.ndarray):
    p_prev, p = np.ones_like(x), x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    # n (x L_n - L_{n-1}) / (x^2 - 1); nodes never reach +-1
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_rule(n: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [lo, hi], nodes ascending.

    Nodes are the roots of L_n found by Newton's method from the classical
    cosine guesses; the rule is exact for polynomials of degree 2n - 1.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (4 * i - 1) / (4 * n + 2))
    if n == 1:
        x = np.zeros(1)
    else:
        active = np.ones(n, dtype=bool)
        for _ in range(NEWTON_MAXITER):
            p, dp = _legendre_and_derivative(n, x[active])
            dx = p / dp
            x[active] -= dx
            done = np.abs(dx) <= NEWTON_TOL
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            if not active.any():
                break
        else:
            raise NonConvergence(
                f"Gauss node iteration for n={n} did not converge in {NEWTON_MAXITER} steps"
            )
    x = np.sort(x)
    # enforce exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_derivative(n, x) if n > 1 else (None, np.ones(1))
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    half = 0.5 * (hi - lo)
    return QuadratureRule(0.5 * (hi + lo) + half * x, half * w, (lo, hi))


def composite_gauss_rule(lo: float, hi: float, panels: int, points: int) -> QuadratureRule:
    """``points``-point Gauss rule on each of ``panels`` equal subintervals."""
    if panels < 1 or points < 1:
        raise ValueError("panels and points must be positive")
    ref = gauss_rule(points)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref.nodes[None, :]).ravel()
    weights = (half[:, None] * ref.weights[None, :]).ravel()
    return QuadratureRule(nodes, weights, (lo, hi), panels)


def project(f: Callable, N: int, rule: QuadratureRule) -> np.ndarray:
    """Legendre coefficients a_0..a_N of ``f`` by discrete L2 projection.

    ``f`` is sampled at the physical nodes of ``rule``; the rule's interval is
    mapped onto [-1, 1].  ``f`` may also be an array of values at the nodes.
    """
    if len(rule) < N + 1:
        raise RuleTooCoarse(f"rule has {len(rule)} points, projection onto P_{N} needs {N + 1}")
    xi, w = rule.reference()
    values = f(rule.nodes) if callable(f) else np.asarray(f, dtype=float)
    values = np.broadcast_to(values, rule.nodes.shape)
    basis = legendre_eval_all(N, xi)
    k = np.arange(N + 1)
    return 0.5 * (2 * k + 1) * (basis @ (w * values))


def synthesize(a, xs, interval=(-1.0, 1.0)) -> np.ndarray:
    """Evaluate sum_k a_k L_k at ``xs`` (physical coordinates on ``interval``)."""
    a = np.asarray(a, dtype=float)
    xi = to_reference(xs, interval)
    return np.tensordot(a, legendre_eval_all(a.size - 1, xi), axes=1)


def gram_matrix(N: int, rule: QuadratureRule) -> np.ndarray:
    xi, w = rule.reference()
    basis = legendre_eval_all(N, xi)
    return (basis * w) @ basis.T
