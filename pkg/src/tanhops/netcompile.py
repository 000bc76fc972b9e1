"""Explicit network realizations of the basic operator.

``compile_basic_operator`` writes ``B_n f`` as one hidden layer of perturbed
tanh units using

    Phi(nx - k) = (1/8) [g_q(nx-k+1) - g_q(nx-k-1) + g_{1/q}(nx-k+1) - g_{1/q}(nx-k-1)],

so every lattice point contributes four units with input weight ``n``.

``build_cascade`` stacks basic operators as residual corrections:
stage ``l`` runs at resolution ``n0 * l`` on what the earlier stages missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from tanhops.errors import DomainError
from tanhops.functions import SmoothFunction
from tanhops.kernel import (
    ActivationParams,
    KernelConfig,
    eval_activation,
    lattice_window,
    ordered_sum,
    truncation_radius,
)

# Kernel mass allowed outside a compiled network's lattice, relative to sup|f|.
COMPILE_TAIL_TOL = 1e-11


@dataclass(frozen=True)
class HiddenUnit:
    input_weight: float
    bias: float
    activation: ActivationParams
    output_weight: float


@dataclass(frozen=True)
class NetworkModel:
    hidden_units: Tuple[HiddenUnit, ...]
    output_bias: float = 0.0
    # Interval on which the model reproduces the operator it was compiled from.
    window: Tuple[float, float] = (-math.inf, math.inf)

    @property
    def unit_count(self) -> int:
        return len(self.hidden_units)


def evaluate_network(model: NetworkModel, x: float) -> float:
    units = model.hidden_units
    pre = np.array([u.input_weight * x + u.bias for u in units], dtype=float)
    act = np.empty_like(pre)
    groups = {}
    for i, u in enumerate(units):
        groups.setdefault(u.activation, []).append(i)
    for params, idx in groups.items():
        act[idx] = eval_activation(params, pre[idx])
    total = 0.0
    # Accumulate in unit order so the result does not depend on the grouping.
    for u, g in zip(units, act.tolist()):
        total += u.output_weight * g
    return total + model.output_bias


def compile_basic_operator(f: SmoothFunction, x_center: float, n: int,
                           cfg: KernelConfig) -> NetworkModel:
    """One-hidden-layer network equal to ``B_n f`` near ``x_center``.

    The lattice holds the ``2W + 1`` points nearest ``n * x_center``.  The
    returned ``window`` is the set of ``x`` whose kernel mass outside that
    lattice stays below ``COMPILE_TAIL_TOL``.
    """
    if n < 1:
        raise DomainError(f"resolution n must be a positive integer, got {n!r}")
    W = cfg.radius_W
    kc = round(n * x_center)
    params = cfg.params
    if cfg.symmetrized:
        members = ((params, 0.125), (params.inverted(), 0.125))
    else:
        members = ((params, 0.25),)
    units: List[HiddenUnit] = []
    for k in range(kc - W, kc + W + 1):
        fk = float(f.eval(k / n))
        for act, scale in members:
            units.append(HiddenUnit(float(n), -k + 1.0, act, scale * fk))
            units.append(HiddenUnit(float(n), -k - 1.0, act, -scale * fk))
    slack = max(0, W - truncation_radius(params, COMPILE_TAIL_TOL))
    window = ((kc - slack - 0.5) / n, (kc + slack + 0.5) / n) if slack else ((kc - 0.5) / n, (kc + 0.5) / n)
    return NetworkModel(tuple(units), 0.0, window)


def write_network(model: NetworkModel, path) -> None:
    """Plain-text export: ``count output_bias`` then one unit per line."""
    lines = [f"{model.unit_count} {model.output_bias:.17g}"]
    for u in model.hidden_units:
        lines.append(f"{u.input_weight:.17g} {u.bias:.17g} {u.activation.q:.17g} "
                     f"{u.activation.lam:.17g} {u.output_weight:.17g}")
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write network table to {path}: {exc}") from exc


def read_network(path) -> NetworkModel:
    with open(path) as fh:
        rows = [line.split() for line in fh if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError(f"{path}: missing 'count output_bias' header")
    count, output_bias = int(rows[0][0]), float(rows[0][1])
    body = rows[1:]
    if len(body) != count:
        raise ValueError(f"{path}: header announces {count} units, found {len(body)}")
    units = []
    for row in body:
        w, b, q, lam, out = map(float, row)
        units.append(HiddenUnit(w, b, ActivationParams(q, lam), out))
    return NetworkModel(tuple(units), output_bias)


@dataclass(frozen=True)
class CascadeStage:
    n: int
    k_start: int
    samples: np.ndarray = field(repr=False)  # residual target at k/n, k = k_start, ...


@dataclass(frozen=True)
class CascadeModel:
    depth_L: int
    stages: Tuple[CascadeStage, ...]
    kernel: KernelConfig
    domain: Tuple[float, float]


def _stage_value(stage: CascadeStage, x: float, cfg: KernelConfig) -> float:
    center = stage.n * x
    ks = lattice_window(center, cfg.radius_W)
    idx = ks.astype(int) - stage.k_start
    if idx[0] < 0 or idx[-1] >= len(stage.samples):
        raise DomainError(f"x={x} lies outside the lattice stored for stage n={stage.n}")
    u = center - ks
    return ordered_sum(stage.samples[idx] * np.asarray(cfg.density(u), dtype=float), np.abs(u))


def _partial_value(stages, x: float, cfg: KernelConfig) -> float:
    h = 0.0
    for stage in stages:
        h += _stage_value(stage, x, cfg)
    return h


def build_cascade(f: SmoothFunction, L: int, n0: int, cfg: KernelConfig,
                  domain: Tuple[float, float] = (-1.0, 1.0)) -> CascadeModel:
    """Depth-``L`` residual cascade valid on ``domain``."""
    if L < 1:
        raise DomainError(f"depth must be at least 1, got {L!r}")
    if n0 < 4:
        raise DomainError(f"base resolution must be at least 4, got {n0!r}")
    lo, hi = domain
    W = cfg.radius_W
    schedule = [n0 * l for l in range(1, L + 1)]
    # margins[l]: how far beyond the domain stage l must be evaluable
    margins = [0.0] * L
    for l in range(L - 1, 0, -1):
        margins[l - 1] = margins[l] + (W + 1) / schedule[l]
    stages: List[CascadeStage] = []
    for l, n in enumerate(schedule):
        a, b = lo - margins[l], hi + margins[l]
        k_start = math.floor(n * a) - W
        k_stop = math.ceil(n * b) + W
        ks = np.arange(k_start, k_stop + 1)
        pts = ks / n
        prior = np.array([_partial_value(stages, p, cfg) for p in pts.tolist()]) if stages \
            else np.zeros_like(pts)
        target = np.asarray(f.eval(pts), dtype=float) - prior
        stages.append(CascadeStage(n, k_start, target))
    return CascadeModel(L, tuple(stages), cfg, (float(lo), float(hi)))


def evaluate_cascade(model: CascadeModel, x: float) -> float:
    lo, hi = model.domain
    if not lo <= x <= hi:
        raise DomainError(f"x={x} outside the cascade domain [{lo}, {hi}]")
    return _partial_value(model.stages, x, model.kernel)
