"""Truncated lattice-sum operators built on the kernel density.

All three operators share one outer sum

    Op_n(f, x) = sum_k  cell(f, k, n) * Phi(n x - k),

taken over ``k = floor(nx) - W .. ceil(nx) + W`` and accumulated from the
window edges toward the center.  They differ only in ``cell``:

* basic:        f(k/n)
* kantorovich:  n * integral_0^{1/n} f(t + k/n) dt   (via an inner rule)
* quadrature:   sum_r w_r f(k/n + node_r/n)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from tanhops.errors import DomainError
from tanhops.functions import SmoothFunction, monomial
from tanhops.kernel import KernelConfig, lattice_window, ordered_sum


class OperatorKind(str, Enum):
    BASIC = "basic"
    KANTOROVICH = "kantorovich"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in [0, 1] with positive weights summing to one."""

    nodes: tuple
    weights: tuple

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        weights = tuple(float(v) for v in self.weights)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if len(nodes) == 0 or len(nodes) != len(weights):
            raise DomainError("rule needs matching, non-empty node and weight lists")
        if any(not (0.0 <= t <= 1.0) for t in nodes):
            raise DomainError("rule nodes must lie in [0, 1]")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError("rule nodes must be strictly increasing")
        if any(w <= 0 for w in weights):
            raise DomainError("rule weights must be positive")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise DomainError(f"rule weights must sum to 1, got {math.fsum(weights)!r}")


@lru_cache(maxsize=None)
def gauss_legendre(m: int = 8) -> QuadratureRule:
    t, w = np.polynomial.legendre.leggauss(m)
    return QuadratureRule(tuple(0.5 * (t + 1.0)), tuple(0.5 * w))


LEFT_ENDPOINT = QuadratureRule((0.0,), (1.0,))
SIMPSON = QuadratureRule((0.0, 0.5, 1.0), (1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0))


def _cell_values(f: SmoothFunction, ks: np.ndarray, n: int, rule: QuadratureRule) -> np.ndarray:
    base = ks / n
    acc = np.zeros_like(base)
    for node, weight in zip(rule.nodes, rule.weights):
        acc = acc + weight * np.asarray(f.eval(base + node / n), dtype=float)
    return acc


def _lattice_sum(cells, x: float, n: int, cfg: KernelConfig) -> float:
    if n < 1:
        raise DomainError(f"resolution n must be a positive integer, got {n!r}")
    center = n * x
    ks = lattice_window(center, cfg.radius_W)
    u = center - ks
    weights = np.asarray(cfg.density(u), dtype=float)
    return ordered_sum(cells(ks) * weights, np.abs(u))


def basic_operator(f: SmoothFunction, x: float, n: int, cfg: KernelConfig) -> float:
    return _lattice_sum(lambda ks: np.asarray(f.eval(ks / n), dtype=float), x, n, cfg)


def kantorovich_operator(f: SmoothFunction, x: float, n: int, cfg: KernelConfig,
                         inner_rule: Optional[QuadratureRule] = None) -> float:
    rule = inner_rule or gauss_legendre(8)
    return _lattice_sum(lambda ks: _cell_values(f, ks, n, rule), x, n, cfg)


def quadrature_operator(f: SmoothFunction, x: float, n: int, cfg: KernelConfig,
                        rule: QuadratureRule) -> float:
    return _lattice_sum(lambda ks: _cell_values(f, ks, n, rule), x, n, cfg)


def apply_operator(kind, f: SmoothFunction, x: float, n: int, cfg: KernelConfig,
                   rule: Optional[QuadratureRule] = None) -> float:
    kind = OperatorKind(kind)
    if kind is OperatorKind.BASIC:
        return basic_operator(f, x, n, cfg)
    if kind is OperatorKind.KANTOROVICH:
        return kantorovich_operator(f, x, n, cfg, rule)
    if rule is None:
        raise DomainError("quadrature operator requires a rule")
    return quadrature_operator(f, x, n, cfg, rule)


def central_moment(j: int, x: float, n: int, cfg: KernelConfig) -> float:
    """``sum_k (k/n - x)^j Phi(nx - k)``."""
    if not 0 <= j <= 12:
        raise DomainError(f"moment order must lie in 0..12, got {j!r}")
    return basic_operator(monomial(x, j), x, n, cfg)


def operator_moment(kind, j: int, x: float, n: int, cfg: KernelConfig,
                    rule: Optional[QuadratureRule] = None) -> float:
    """Image of ``(. - x)^j`` under the given operator, evaluated at ``x``."""
    return apply_operator(kind, monomial(x, j), x, n, cfg, rule)


def voronovskaya_residual(f: SmoothFunction, x: float, n: int, N: int, cfg: KernelConfig,
                          operator_kind="basic", rule: Optional[QuadratureRule] = None) -> float:
    """``Op_n f(x) - f(x) - sum_{j=1..N} f^(j)(x)/j! * Op_n((.-x)^j)(x)``."""
    if N > f.max_order:
        raise DomainError(f"expansion order N={N} exceeds max_order={f.max_order} of {f.name}")
    if N < 1:
        raise DomainError(f"expansion order must be positive, got {N!r}")
    raw = apply_operator(operator_kind, f, x, n, cfg, rule) - f.eval(x)
    correction = 0.0
    for j in range(1, N + 1):
        dj = f.d(j, x)
        if dj == 0.0:
            continue
        correction += dj / math.factorial(j) * operator_moment(operator_kind, j, x, n, cfg, rule)
    return raw - correction


def kernel_mass_split(x: float, n: int, beta: float, cfg: KernelConfig) -> tuple[float, float]:
    """Kernel weight on lattice points with ``|k/n - x| < n^-beta`` and on the rest."""
    center = n * x
    ks = lattice_window(center, cfg.radius_W)
    u = center - ks
    weights = np.asarray(cfg.density(u), dtype=float)
    near = np.abs(ks / n - x) < n ** (-beta)
    dist = np.abs(u)
    return ordered_sum(weights[near], dist[near]), ordered_sum(weights[~near], dist[~near])
