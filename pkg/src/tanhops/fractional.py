"""Left and right Caputo derivatives of non-integer order.

With ``N = ceil(alpha)`` and ``nu = N - alpha`` in (0, 1), the left derivative

    (1/Gamma(nu)) int_{x0}^{t} (t - s)^{nu-1} f^(N)(s) ds

becomes, after ``u = (t - s)^nu``,

    (1/Gamma(nu+1)) int_0^{(t-x0)^nu} f^(N)(t - u^{1/nu}) du,

whose integrand is bounded.  When ``1/nu`` is not an integer the inner map
``u = U w^4`` is added so Gauss-Legendre sees a smoother integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from tanhops.errors import DomainError
from tanhops.functions import SmoothFunction


_GRADING = 4


@dataclass(frozen=True)
class CaputoConfig:
    alpha: float
    base_point: float = 0.0
    quad_points: int = 64

    def __post_init__(self):
        a = self.alpha
        if not (math.isfinite(a) and a > 0) or float(a).is_integer():
            raise DomainError(f"alpha must be positive and non-integer, got {a!r}")
        if self.quad_points < 1:
            raise DomainError("quad_points must be positive")

    @property
    def N(self) -> int:
        return math.ceil(self.alpha)


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_fn is defined here for x > 0 only, got {x!r}")
    if x >= 171.6:
        raise DomainError(f"gamma({x}) overflows double precision")
    return math.gamma(x)


@lru_cache(maxsize=None)
def _legendre(m: int):
    t, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (t + 1.0), 0.5 * w


def _transformed_integral(f: SmoothFunction, N: int, nu: float, t: float, dist: float,
                          sign: float, m: int) -> float:
    if dist == 0.0:
        return 0.0
    upper = dist ** nu
    nodes, weights = _legendre(m)
    # u^{1/nu} is not smooth at 0 unless 1/nu is an integer; grade u = upper * w^k.
    k = 1 if abs(1.0 / nu - round(1.0 / nu)) < 1e-12 else _GRADING
    u = upper * nodes ** k
    jac = k * nodes ** (k - 1)
    vals = np.asarray(f.d(N, t + sign * u ** (1.0 / nu)), dtype=float)
    return upper * float(np.dot(weights, jac * vals)) / gamma_fn(nu + 1.0)


def _check_order(f: SmoothFunction, N: int):
    if N > f.max_order:
        raise DomainError(f"{f.name} exposes derivatives up to {f.max_order}, Caputo needs {N}")


def caputo_left(f: SmoothFunction, cfg: CaputoConfig, t: float) -> float:
    """Left Caputo derivative anchored at ``cfg.base_point``, evaluated at ``t >= base_point``."""
    if t < cfg.base_point:
        raise DomainError(f"left Caputo needs t >= base point {cfg.base_point}, got {t}")
    _check_order(f, cfg.N)
    return _transformed_integral(f, cfg.N, cfg.N - cfg.alpha, t, t - cfg.base_point, -1.0,
                                 cfg.quad_points)


def caputo_right(f: SmoothFunction, cfg: CaputoConfig, t: float) -> float:
    """Right Caputo derivative, ``t <= base_point``; carries the ``(-1)^N`` sign."""
    if t > cfg.base_point:
        raise DomainError(f"right Caputo needs t <= base point {cfg.base_point}, got {t}")
    _check_order(f, cfg.N)
    val = _transformed_integral(f, cfg.N, cfg.N - cfg.alpha, t, cfg.base_point - t, 1.0,
                                cfg.quad_points)
    return -val if cfg.N % 2 else val


def caputo_polynomial_reference(p: int, alpha: float, dt: float) -> float:
    """Closed form ``Gamma(p+1)/Gamma(p+1-alpha) dt^(p-alpha)`` for ``(s - x0)^p``."""
    if p < math.ceil(alpha):
        raise DomainError(f"monomial degree {p} is below ceil(alpha)={math.ceil(alpha)}")
    if dt < 0:
        raise DomainError("distance from the base point must be non-negative")
    if dt == 0.0:
        return 0.0
    return gamma_fn(p + 1.0) / gamma_fn(p + 1.0 - alpha) * dt ** (p - alpha)
