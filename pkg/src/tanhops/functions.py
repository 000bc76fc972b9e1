"""Scalar test functions carrying analytic derivatives.

Every built-in function evaluates on floats or numpy arrays.  Derivatives are
hand-coded so that operators and Caputo quadratures never differentiate
numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from tanhops.errors import DomainError

DEFAULT_MAX_ORDER = 6


@dataclass(frozen=True)
class SmoothFunction:
    eval: Callable
    derivative: Callable  # (order, x) -> value
    max_order: int
    sup_norm_dN: Optional[float] = None
    name: str = "f"

    def __call__(self, x):
        return self.eval(x)

    def d(self, order: int, x):
        if order < 0 or order > self.max_order:
            raise DomainError(f"{self.name}: derivative of order {order} not available "
                              f"(max_order={self.max_order})")
        if order == 0:
            return self.eval(x)
        return self.derivative(order, x)

    def consistency_defect(self, points, h: float = 1e-5) -> float:
        """Largest relative mismatch between each derivative and a central difference
        of the one below it."""
        worst = 0.0
        for j in range(1, self.max_order + 1):
            for x in points:
                fd = (self.d(j - 1, x + h) - self.d(j - 1, x - h)) / (2 * h)
                exact = self.d(j, x)
                scale = max(1.0, abs(exact))
                worst = max(worst, abs(fd - exact) / scale)
        return worst


def _fill(x, value):
    if np.ndim(x) == 0:
        return float(value)
    return np.full(np.shape(x), float(value))


def constant(c: float, max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    return SmoothFunction(
        eval=lambda x: _fill(x, c),
        derivative=lambda j, x: _fill(x, 0.0),
        max_order=max_order,
        sup_norm_dN=0.0,
        name=f"const({c})",
    )


def monomial(center: float, power: int, max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    """``(x - center)^power`` with exact zeros at ``center``."""

    def deriv(j, x):
        if j > power:
            return _fill(x, 0.0)
        out = math.perm(power, j) * (np.asarray(x, dtype=float) - center) ** (power - j)
        return float(out) if np.ndim(x) == 0 else out

    return SmoothFunction(
        eval=lambda x: deriv(0, x),
        derivative=deriv,
        max_order=max(max_order, power),
        sup_norm_dN=None,
        name=f"(x-{center})^{power}",
    )


def polynomial(coeffs, max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    """Polynomial with coefficients in increasing degree."""
    base = np.polynomial.Polynomial(coeffs)
    derivs = [base]
    for _ in range(max_order):
        derivs.append(derivs[-1].deriv())
    top = derivs[max_order]
    sup = float(abs(top.coef[0])) if top.degree() == 0 else None

    def ev(j, x):
        out = derivs[j](np.asarray(x, dtype=float))
        return float(out) if np.ndim(x) == 0 else out

    return SmoothFunction(eval=lambda x: ev(0, x), derivative=ev, max_order=max_order,
                          sup_norm_dN=sup, name=f"poly{tuple(coeffs)}")


def sine(max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    cycle = (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))

    def ev(j, x):
        out = cycle[j % 4](np.asarray(x, dtype=float))
        return float(out) if np.ndim(x) == 0 else out

    return SmoothFunction(eval=lambda x: ev(0, x), derivative=ev, max_order=max_order,
                          sup_norm_dN=1.0, name="sin")


def _gaussian_factor_polys(max_order: int):
    # d^i/dx^i e^{-x^2} = G_i(x) e^{-x^2},  G_{i+1} = G_i' - 2x G_i
    x = np.polynomial.Polynomial([0.0, 1.0])
    polys = [np.polynomial.Polynomial([1.0])]
    for _ in range(max_order):
        g = polys[-1]
        polys.append(g.deriv() - 2.0 * x * g)
    return polys


def exp_decay(max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    """``e^{-x^2}``."""
    polys = _gaussian_factor_polys(max_order)

    def ev(j, x):
        xa = np.asarray(x, dtype=float)
        out = polys[j](xa) * np.exp(-xa * xa)
        return float(out) if np.ndim(x) == 0 else out

    return SmoothFunction(eval=lambda x: ev(0, x), derivative=ev, max_order=max_order,
                          name="exp_decay")


def flat_at(x0: float, N: int, max_order: int = DEFAULT_MAX_ORDER) -> SmoothFunction:
    """``(x - x0)^(N+1) e^{-x^2}``: derivatives of orders 1..N vanish exactly at ``x0``."""
    m = N + 1
    max_order = max(max_order, N + 1)
    polys = _gaussian_factor_polys(max_order)

    def ev(j, x):
        xa = np.asarray(x, dtype=float)
        gauss = np.exp(-xa * xa)
        dx = xa - x0
        total = np.zeros_like(xa)
        # Leibniz rule; only terms where the polynomial factor keeps a power survive.
        for i in range(j + 1):
            k = j - i  # order on (x - x0)^m
            if k > m:
                continue
            total = total + math.comb(j, i) * math.perm(m, k) * dx ** (m - k) * polys[i](xa)
        out = total * gauss
        return float(out) if np.ndim(x) == 0 else out

    return SmoothFunction(eval=lambda x: ev(0, x), derivative=ev, max_order=max_order,
                          name=f"flat_at({x0},N={N})")


def linear_combination(a: float, f: SmoothFunction, b: float, g: SmoothFunction) -> SmoothFunction:
    order = min(f.max_order, g.max_order)
    return SmoothFunction(
        eval=lambda x: a * f.eval(x) + b * g.eval(x),
        derivative=lambda j, x: a * f.d(j, x) + b * g.d(j, x),
        max_order=order,
        name=f"{a}*{f.name}+{b}*{g.name}",
    )


def shifted(f: SmoothFunction, h: float) -> SmoothFunction:
    """``x -> f(x - h)``."""
    return SmoothFunction(
        eval=lambda x: f.eval(np.asarray(x, dtype=float) - h if np.ndim(x) else float(x) - h),
        derivative=lambda j, x: f.d(j, np.asarray(x, dtype=float) - h if np.ndim(x) else float(x) - h),
        max_order=f.max_order,
        sup_norm_dN=f.sup_norm_dN,
        name=f"{f.name}(x-{h})",
    )


CATALOG = ("sin", "exp_decay", "poly3", "flat_at_x0")

# Fixed cubic for the exact-cancellation case.
POLY3_COEFFS = (0.5, -1.0, 0.75, 2.0)


def builtin(function_id: str, N: int = 2, x0: float = 0.3) -> SmoothFunction:
    """Catalog lookup used by the study configs."""
    if function_id == "sin":
        return sine()
    if function_id == "exp_decay":
        return exp_decay()
    if function_id == "poly3":
        return polynomial(POLY3_COEFFS)
    if function_id == "flat_at_x0":
        return flat_at(x0, N)
    raise DomainError(f"unknown function id {function_id!r}; choose from {CATALOG}")
