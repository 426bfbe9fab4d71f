"""Gaussian convolution kernel: evaluation, truncation and periodization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import QuadratureRule, composite_gauss_rule
from .errors import NoTruncation

WRAP_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel sqrt(s/pi) exp(-s x^2), optionally periodized with period L.

    ``delta`` is the equivalent standard deviation, s = 1/(2 delta^2).  For a
    periodic kernel ``wrap_radius`` image copies are summed on each side of the
    minimum-image distance; left as ``None`` it is chosen so that the neglected
    tail stays below 1e-14.
    """

    s: float
    periodic: bool = False
    period: float | None = None
    wrap_radius: int | None = None
    family: str = field(default="gaussian")

    def __post_init__(self):
        if self.family != "gaussian":
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if not self.s > 0:
            raise ValueError("kernel scale s must be positive")
        if self.periodic:
            if self.period is None or not self.period > 0:
                raise ValueError("periodic kernel needs a positive period")
            if self.wrap_radius is None:
                object.__setattr__(self, "wrap_radius", default_wrap_radius(self.s, self.period))
            elif self.wrap_radius < 0:
                raise ValueError("wrap_radius must be nonnegative")
        elif self.period is not None:
            raise ValueError("period given for a non-periodic kernel")

    @classmethod
    def from_delta(cls, delta: float, **kwargs) -> "KernelSpec":
        if not delta > 0:
            raise ValueError("delta must be positive")
        return cls(s=1.0 / (2.0 * delta * delta), **kwargs)

    @property
    def delta(self) -> float:
        return 1.0 / math.sqrt(2.0 * self.s)

    @property
    def peak(self) -> float:
        """max_x J(x) of the unperiodized kernel."""
        return math.sqrt(self.s / math.pi)

    def __call__(self, x):
        return kernel_eval(self, x)


def _gaussian(s: float, x):
    return math.sqrt(s / math.pi) * np.exp(-s * np.square(x))


def default_wrap_radius(s: float, period: float) -> int:
    """Smallest R whose first omitted image pair contributes < 1e-14."""
    R = 0
    # images beyond R sit at least (R + 1/2) L away once x is reduced to [-L/2, L/2]
    while 2.0 * float(_gaussian(s, (R + 0.5) * period)) >= WRAP_TAIL_TOL:
        R += 1
    return R


def kernel_eval(spec: KernelSpec, x):
    """J(x); for a periodic spec, sum_{|r| <= R} J_inf(x - r L) about the minimum image."""
    x = np.asarray(x, dtype=float)
    if not spec.periodic:
        out = _gaussian(spec.s, x)
    else:
        L = spec.period
        x0 = x - L * np.round(x / L)
        out = _gaussian(spec.s, x0)
        for r in range(1, spec.wrap_radius + 1):
            out = out + _gaussian(spec.s, x0 - r * L) + _gaussian(spec.s, x0 + r * L)
    return out if out.ndim else float(out)


def truncation_radius(delta: float, eps: float) -> float:
    """Half-width A at which the normal density of width ``delta`` drops to ``eps``.

    A = sqrt(-2 delta^2 log(delta eps sqrt(2 pi))).
    """
    if not (delta > 0 and eps > 0):
        raise ValueError("delta and eps must be positive")
    arg = delta * eps * math.sqrt(2.0 * math.pi)
    if arg > 1.0:
        raise NoTruncation(f"density peak {1 / (delta * math.sqrt(2 * math.pi)):.3g} is below eps={eps:g}")
    return math.sqrt(max(-2.0 * delta * delta * math.log(arg), 0.0))


def mass_rule(spec: KernelSpec, lo: float, hi: float, points: int = 16) -> QuadratureRule:
    """Composite Gauss rule on [lo, hi] with panels no wider than 4 kernel widths."""
    panels = max(1, math.ceil((hi - lo) / (4.0 * spec.delta)))
    return composite_gauss_rule(lo, hi, panels, points)


def kernel_mass(spec: KernelSpec, x, lo: float, hi: float, rule: QuadratureRule | None = None):
    """Quadrature value of int_lo^hi J(x - y) dy."""
    if hi == lo:
        return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
    if rule is None:
        rule = mass_rule(spec, lo, hi)
    x = np.asarray(x, dtype=float)
    vals = kernel_eval(spec, x[..., None] - rule.nodes) @ rule.weights
    return float(vals) if np.ndim(vals) == 0 else vals
