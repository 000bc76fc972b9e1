"""Perturbed tanh activation, the densities built from it, and their tails.

The activation is

    g(x) = (e^{lam x} - q e^{-lam x}) / (e^{lam x} + q e^{-lam x}),

which equals ``tanh(lam*x - log(q)/2)``.  The density is the quarter
difference ``M(x) = (g(x+1) - g(x-1)) / 4`` and the symmetrized density
averages ``M`` over ``q`` and ``1/q``.

Every evaluator accepts a float or a numpy array and returns the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from tanhops.errors import DomainError, QuadratureError

# Above this value of lam*|x| the activation is evaluated in the divided form.
_OVERFLOW_SWITCH = 30.0


@dataclass(frozen=True)
class ActivationParams:
    """Asymmetry ``q`` and steepness ``lam`` of the perturbed tanh."""

    q: float
    lam: float

    def __post_init__(self):
        for name in ("q", "lam"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")

    def inverted(self) -> "ActivationParams":
        return ActivationParams(1.0 / self.q, self.lam)

    @property
    def shift(self) -> float:
        """Horizontal offset ``log(q) / 2`` so that ``g(x) = tanh(lam*x - shift)``."""
        return 0.5 * math.log(self.q)


@dataclass(frozen=True)
class KernelDecayBound:
    """Envelope ``C * exp(-gamma * |x|)`` dominating the density for ``|x| >= 2``."""

    C: float
    gamma: float

    def __call__(self, x):
        return self.C * np.exp(-self.gamma * np.abs(x))


@dataclass(frozen=True)
class KernelConfig:
    """Activation parameters plus the truncation window used by all lattice sums.

    ``symmetrized=False`` swaps the symmetrized density for the plain density
    ``M`` of ``params``; the stability study needs that variant because the
    symmetrized density is even in ``log q``.
    """

    params: ActivationParams
    truncation_tol: float
    radius_W: int
    decay: KernelDecayBound
    symmetrized: bool = field(default=True)

    @classmethod
    def build(cls, params: ActivationParams, truncation_tol: float = 1e-12,
              symmetrized: bool = True) -> "KernelConfig":
        return cls(
            params=params,
            truncation_tol=truncation_tol,
            radius_W=truncation_radius(params, truncation_tol),
            decay=compute_decay_bound(params),
            symmetrized=symmetrized,
        )

    @classmethod
    def from_values(cls, q: float = 1.0, lam: float = 1.0, truncation_tol: float = 1e-12,
                    symmetrized: bool = True) -> "KernelConfig":
        return cls.build(ActivationParams(q, lam), truncation_tol, symmetrized)

    def density(self, x):
        if self.symmetrized:
            return eval_symmetrized_density(self.params, x)
        return eval_density(self.params, x)

    def tail_bound(self, W: int | None = None) -> float:
        W = self.radius_W if W is None else W
        return _tail_bound(self.decay, W)

    def with_params(self, params: ActivationParams) -> "KernelConfig":
        return KernelConfig.build(params, self.truncation_tol, self.symmetrized)


def _finish(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise DomainError("activation argument must be finite")


def eval_activation(params: ActivationParams, x):
    """Perturbed hyperbolic tangent ``g_{q,lam}(x)``."""
    _check_finite(x)
    xa = np.asarray(x, dtype=float)
    q, lam = params.q, params.lam
    # Direct formula on the inner band, clipped so the unused branch cannot overflow.
    xc = np.clip(xa, -_OVERFLOW_SWITCH / lam, _OVERFLOW_SWITCH / lam)
    ep, em = np.exp(lam * xc), q * np.exp(-lam * xc)
    direct = (ep - em) / (ep + em)
    # Divided through by e^{lam |x|}.
    xpos = np.maximum(xa, 0.0)
    xneg = np.minimum(xa, 0.0)
    r = q * np.exp(-2.0 * lam * xpos)
    s = np.exp(2.0 * lam * xneg) / q
    upper = (1.0 - r) / (1.0 + r)
    lower = (s - 1.0) / (s + 1.0)
    out = np.where(lam * np.abs(xa) <= _OVERFLOW_SWITCH, direct, np.where(xa > 0, upper, lower))
    return _finish(x, out)


def activation_derivative(params: ActivationParams, x, order: int = 1):
    """First or second derivative of the activation."""
    if order not in (1, 2):
        raise DomainError(f"only derivative orders 1 and 2 are supported, got {order!r}")
    _check_finite(x)
    xa = np.asarray(x, dtype=float)
    q, lam = params.q, params.lam
    # 4 q lam / (e^{lam x} + q e^{-lam x})^2, divided through by the dominant exponential.
    xpos = np.maximum(xa, 0.0)
    xneg = np.minimum(xa, 0.0)
    r = q * np.exp(-2.0 * lam * xpos)
    s = np.exp(2.0 * lam * xneg) / q
    d_pos = 4.0 * lam * r / (1.0 + r) ** 2
    d_neg = 4.0 * lam * s / (1.0 + s) ** 2
    d1 = np.where(xa >= 0, d_pos, d_neg)
    if order == 1:
        return _finish(x, d1)
    # g'' = -2 lam g g'
    return _finish(x, -2.0 * lam * np.asarray(eval_activation(params, xa)) * d1)


def _half_density(lam: float, shift, x):
    # (g(x+1) - g(x-1)) / 4 with g = tanh(lam*x - shift), rewritten as
    # sinh(2 lam) / (4 cosh a cosh b) so no cancellation occurs in the tails.
    a = np.abs(lam * (x + 1.0) - shift)
    b = np.abs(lam * (x - 1.0) - shift)
    num = 0.5 * (-math.expm1(-4.0 * lam)) * np.exp(2.0 * lam - (a + b))
    return num / ((1.0 + np.exp(-2.0 * a)) * (1.0 + np.exp(-2.0 * b)))


def eval_density(params: ActivationParams, x):
    """Density ``M_{q,lam}(x) = (g(x+1) - g(x-1)) / 4``; strictly positive."""
    xa = np.asarray(x, dtype=float)
    return _finish(x, _half_density(params.lam, params.shift, xa))


def eval_symmetrized_density(params: ActivationParams, x):
    """``(M_{q,lam}(x) + M_{1/q,lam}(x)) / 2``, even in ``x`` and in ``log q``."""
    xa = np.asarray(x, dtype=float)
    c = 0.5 * abs(math.log(params.q))
    out = 0.5 * (_half_density(params.lam, c, xa) + _half_density(params.lam, -c, xa))
    return _finish(x, out)


def compute_decay_bound(params: ActivationParams) -> KernelDecayBound:
    """Mean-value envelope: ``M(x) = g'(xi)/2`` with ``g'(y) <= 4 lam max(q,1/q) e^{-2 lam |y|}``."""
    lam = params.lam
    qmax = max(params.q, 1.0 / params.q)
    return KernelDecayBound(C=2.0 * lam * qmax * math.exp(2.0 * lam), gamma=2.0 * lam)


def _tail_bound(decay: KernelDecayBound, W: int) -> float:
    return 2.0 * decay.C * math.exp(-decay.gamma * W) / (-math.expm1(-decay.gamma))


def truncation_radius(params: ActivationParams, tol: float) -> int:
    """Smallest lattice half-width ``W >= 2`` whose geometric tail bound is below ``tol``."""
    if not (0.0 < tol < 1.0):
        raise DomainError(f"truncation tolerance must lie in (0, 1), got {tol!r}")
    decay = compute_decay_bound(params)
    guess = math.log(2.0 * decay.C / (tol * (-math.expm1(-decay.gamma)))) / decay.gamma
    W = max(2, math.ceil(guess))
    # Guard against rounding in the closed form.
    while W > 2 and _tail_bound(decay, W - 1) <= tol:
        W -= 1
    while _tail_bound(decay, W) > tol:
        W += 1
    return W


def lattice_window(center: float, W: int) -> np.ndarray:
    """Integers from ``floor(center) - W`` to ``ceil(center) + W``."""
    return np.arange(math.floor(center) - W, math.ceil(center) + W + 1, dtype=float)


def ordered_sum(terms: np.ndarray, distance: np.ndarray) -> float:
    """Sequential sum, farthest terms first; ties broken by position."""
    order = np.lexsort((np.arange(len(distance)), -np.asarray(distance)))
    total = 0.0
    for value in np.asarray(terms)[order].tolist():
        total += value
    return total


def partition_defect(params: ActivationParams, x: float, W: int, symmetrized: bool = True) -> float:
    """``|sum_k Phi(x - k) - 1|`` over the window ``floor(x)-W .. ceil(x)+W``."""
    if W < 2:
        raise DomainError(f"window half-width must be at least 2, got {W!r}")
    ks = lattice_window(x, W)
    u = x - ks
    dens = eval_symmetrized_density(params, u) if symmetrized else eval_density(params, u)
    return abs(ordered_sum(dens, np.abs(u)) - 1.0)


def _adaptive_simpson(fn, a: float, b: float, tol: float, max_depth: int = 50,
                      max_evals: int = 2_000_000) -> float:
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    evals = 3
    failed = False
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        evals += 2
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or depth >= max_depth or evals >= max_evals:
            if abs(delta) > 15.0 * eps:
                failed = True
            total += left + right + delta / 15.0
        else:
            # Right half pushed first so the left half is integrated first.
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    if failed:
        raise QuadratureError("adaptive Simpson did not reach the requested tolerance", total)
    return total


def integrate_density(params: ActivationParams, half_width: float, tol: float,
                      symmetrized: bool = True) -> float:
    """Adaptive-Simpson integral of the density over ``[-half_width, half_width]``."""
    if half_width < 10.0 / params.lam:
        raise DomainError(f"half_width must be at least 10/lam = {10.0 / params.lam}")
    if symmetrized:
        fn = lambda t: eval_symmetrized_density(params, t)  # noqa: E731
    else:
        fn = lambda t: eval_density(params, t)  # noqa: E731
    return _adaptive_simpson(fn, -float(half_width), float(half_width), tol)
