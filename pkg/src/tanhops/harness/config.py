"""Study configurations and the flat ``key = value`` file format.

A config file holds one ``key = value`` pair per line; ``#`` starts a comment
and list values are comma separated::

    function_id = sin
    x_points = 0.3
    n_grid = 16, 32, 64, 128, 256, 512, 1024
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from tanhops.errors import ConfigError, DomainError
from tanhops.functions import CATALOG, SmoothFunction, builtin
from tanhops.kernel import KernelConfig
from tanhops.operators import LEFT_ENDPOINT, SIMPSON, OperatorKind, QuadratureRule, gauss_legendre

DEFAULT_BETA = 0.5
DEFAULT_EPSILON = 0.5

RULES = {
    "left": lambda: LEFT_ENDPOINT,
    "simpson": lambda: SIMPSON,
    "gauss8": lambda: gauss_legendre(8),
}


def _kernel(q: float, lam: float, tol: float, symmetrized: bool = True) -> KernelConfig:
    try:
        return KernelConfig.from_values(q, lam, tol, symmetrized)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _check_grid(name: str, grid, min_len: int = 1, powers_of_two: bool = False):
    if len(grid) < min_len:
        raise ConfigError(f"{name} needs at least {min_len} entries")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    if any(v < 1 for v in grid):
        raise ConfigError(f"{name} entries must be positive")
    if powers_of_two and any(v & (v - 1) for v in grid):
        raise ConfigError(f"{name} entries must be powers of two")


def _check_rate_params(N: int, beta: float, epsilon: float):
    if N < 1:
        raise ConfigError("N must be a positive integer")
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < epsilon <= N:
        raise ConfigError(f"epsilon must lie in (0, N], got {epsilon}")


@dataclass(frozen=True)
class ConvergenceStudyConfig:
    function_id: str = "sin"
    x_points: Tuple[float, ...] = (0.3,)
    n_grid: Tuple[int, ...] = (16, 32, 64, 128, 256, 512, 1024)
    N: int = 2
    beta: float = DEFAULT_BETA
    epsilon: float = DEFAULT_EPSILON
    operator_kind: str = "basic"
    kernel: KernelConfig = field(default_factory=lambda: KernelConfig.from_values(1.0, 1.0))
    x0: float = 0.3
    rule: str = "gauss8"
    workers: int = 1

    def __post_init__(self):
        if self.function_id not in CATALOG:
            raise ConfigError(f"function_id must be one of {CATALOG}, got {self.function_id!r}")
        _check_grid("n_grid", self.n_grid, min_len=4, powers_of_two=True)
        _check_rate_params(self.N, self.beta, self.epsilon)
        if not self.x_points:
            raise ConfigError("x_points must not be empty")
        try:
            OperatorKind(self.operator_kind)
        except ValueError as exc:
            raise ConfigError(f"unknown operator_kind {self.operator_kind!r}") from exc
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {sorted(RULES)}, got {self.rule!r}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")

    @property
    def rate_exponent(self) -> float:
        return self.beta * (self.N - self.epsilon)

    @property
    def quadrature_rule(self) -> QuadratureRule:
        return RULES[self.rule]()

    def function(self) -> SmoothFunction:
        return builtin(self.function_id, N=self.N, x0=self.x0)


@dataclass(frozen=True)
class StabilityStudyConfig:
    function_id: str = "sin"
    x_points: Tuple[float, ...] = tuple(round(-1.0 + 0.1 * i, 10) for i in range(21))
    n_grid: Tuple[int, ...] = (64, 128, 256)
    deltas: Tuple[float, ...] = (1e-3, 1e-2)
    lam: float = 1.0
    N: int = 2
    beta: float = DEFAULT_BETA
    epsilon: float = DEFAULT_EPSILON
    truncation_tol: float = 1e-12
    # "asymmetric" perturbs the plain density M_q; "symmetrized" perturbs Phi.
    density: str = "asymmetric"
    x0: float = 0.3
    workers: int = 1

    def __post_init__(self):
        if self.function_id not in CATALOG:
            raise ConfigError(f"function_id must be one of {CATALOG}, got {self.function_id!r}")
        _check_grid("n_grid", self.n_grid)
        _check_rate_params(self.N, self.beta, self.epsilon)
        if not self.deltas:
            raise ConfigError("deltas must not be empty")
        if any(b <= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigError("deltas must be strictly increasing")
        if any(not 0.0 < d < 0.5 for d in self.deltas):
            raise ConfigError("deltas must lie in (0, 0.5)")
        if not self.lam > 0:
            raise ConfigError("lam must be positive")
        if self.density not in ("asymmetric", "symmetrized"):
            raise ConfigError(f"density must be 'asymmetric' or 'symmetrized', got {self.density!r}")
        if not self.x_points:
            raise ConfigError("x_points must not be empty")
        if self.workers < 1:
            raise ConfigError("workers must be positive")

    @property
    def rate_exponent(self) -> float:
        return self.beta * (self.N - self.epsilon)

    def function(self) -> SmoothFunction:
        return builtin(self.function_id, N=self.N, x0=self.x0)

    def kernel_for(self, q: float) -> KernelConfig:
        return _kernel(q, self.lam, self.truncation_tol, self.density == "symmetrized")


@dataclass(frozen=True)
class FractionalStudyConfig:
    alpha: float = 1.5
    convergence: ConvergenceStudyConfig = field(default_factory=lambda: ConvergenceStudyConfig(
        function_id="flat_at_x0", x_points=(0.3,), n_grid=(128, 256, 512, 1024), N=2,
        operator_kind="kantorovich"))
    caputo_span: float = 2.0
    caputo_samples: int = 9

    def __post_init__(self):
        if math.ceil(self.alpha) != self.convergence.N or float(self.alpha).is_integer():
            raise ConfigError(f"alpha={self.alpha} must be non-integer with ceil(alpha) = N "
                              f"= {self.convergence.N}")
        if self.caputo_span <= 0 or self.caputo_samples < 2:
            raise ConfigError("caputo_span must be positive and caputo_samples at least 2")


@dataclass(frozen=True)
class CascadeStudyConfig:
    function_id: str = "sin"
    depths: Tuple[int, ...] = (1, 2, 4, 8, 16)
    n0: int = 8
    domain: Tuple[float, float] = (-1.0, 1.0)
    grid_points: int = 101
    kernel: KernelConfig = field(default_factory=lambda: KernelConfig.from_values(1.0, 1.0))
    x0: float = 0.3
    N: int = 2

    def __post_init__(self):
        if self.function_id not in CATALOG:
            raise ConfigError(f"function_id must be one of {CATALOG}, got {self.function_id!r}")
        _check_grid("depths", self.depths)
        if self.n0 < 4:
            raise ConfigError("n0 must be at least 4")
        if not self.domain[0] < self.domain[1]:
            raise ConfigError("domain must be an increasing pair")
        if self.grid_points < 2:
            raise ConfigError("grid_points must be at least 2")

    def function(self) -> SmoothFunction:
        return builtin(self.function_id, N=self.N, x0=self.x0)


@dataclass(frozen=True)
class CompileStudyConfig:
    function_ids: Tuple[str, ...] = ("sin", "poly3", "exp_decay")
    params: Tuple[Tuple[float, float], ...] = ((1.0, 1.0), (2.0, 1.0), (0.5, 3.0))
    n_grid: Tuple[int, ...] = (8, 32)
    x_center: float = 0.37
    points: int = 200
    truncation_tol: float = 1e-12
    tolerance: float = 1e-10
    export_dir: Optional[str] = None
    x0: float = 0.3
    N: int = 2

    def __post_init__(self):
        for fid in self.function_ids:
            if fid not in CATALOG:
                raise ConfigError(f"unknown function id {fid!r}")
        if not self.params or any(q <= 0 or lam <= 0 for q, lam in self.params):
            raise ConfigError("params must be non-empty (q, lambda) pairs with positive entries")
        _check_grid("n_grid", self.n_grid)
        if self.points < 1:
            raise ConfigError("points must be positive")


@dataclass(frozen=True)
class DensityCheckConfig:
    q_values: Tuple[float, ...] = (0.5, 1.0, 2.0)
    lambda_values: Tuple[float, ...] = (1.0, 2.0, 4.0)
    half_width: float = 50.0
    quad_tol: float = 1e-10
    truncation_tol: float = 1e-12
    samples: int = 1000
    sample_range: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if not self.q_values or not self.lambda_values:
            raise ConfigError("q_values and lambda_values must be non-empty")
        if any(v <= 0 for v in self.q_values + self.lambda_values):
            raise ConfigError("q and lambda values must be positive")
        if self.samples < 1:
            raise ConfigError("samples must be positive")


# ---------------------------------------------------------------- file parsing

def read_key_values(path) -> Dict[str, str]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_key_values(text, source=str(path))


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _as_float(key, value):
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _as_int(key, value):
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _as_list(key, value, conv):
    items = [v.strip() for v in value.split(",") if v.strip()]
    return tuple(conv(key, v) for v in items)


def _as_bool(key, value):
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _as_pairs(key, value):
    pairs = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = _as_list(key, chunk, _as_float)
        if len(parts) != 2:
            raise ConfigError(f"{key}: expected 'q, lambda' pairs separated by ';'")
        pairs.append(parts)
    return tuple(pairs)


def _take(values: Dict[str, str], parsers: Dict[str, callable]) -> dict:
    unknown = set(values) - set(parsers)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return {k: parsers[k](k, v) for k, v in values.items()}


_KERNEL_KEYS = {"q": _as_float, "lambda": _as_float, "truncation_tol": _as_float,
                "symmetrized": _as_bool}


def _split_kernel(kv: dict) -> Tuple[dict, Optional[KernelConfig]]:
    kernel_args = {k: kv.pop(k) for k in list(kv) if k in _KERNEL_KEYS}
    if not kernel_args:
        return kv, None
    return kv, _kernel(kernel_args.get("q", 1.0), kernel_args.get("lambda", 1.0),
                       kernel_args.get("truncation_tol", 1e-12),
                       kernel_args.get("symmetrized", True))


_STR = lambda k, v: v  # noqa: E731

_CONVERGENCE_KEYS = {
    "function_id": _STR,
    "x_points": lambda k, v: _as_list(k, v, _as_float),
    "n_grid": lambda k, v: _as_list(k, v, _as_int),
    "N": _as_int,
    "beta": _as_float,
    "epsilon": _as_float,
    "operator_kind": _STR,
    "x0": _as_float,
    "rule": _STR,
    "workers": _as_int,
    **_KERNEL_KEYS,
}


def _build(cls, kwargs):
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def convergence_config(values: Dict[str, str]) -> ConvergenceStudyConfig:
    kv, kernel = _split_kernel(_take(values, _CONVERGENCE_KEYS))
    if kernel is not None:
        kv["kernel"] = kernel
    return _build(ConvergenceStudyConfig, kv)


def stability_config(values: Dict[str, str]) -> StabilityStudyConfig:
    parsers = {
        "function_id": _STR,
        "x_points": lambda k, v: _as_list(k, v, _as_float),
        "n_grid": lambda k, v: _as_list(k, v, _as_int),
        "deltas": lambda k, v: _as_list(k, v, _as_float),
        "lambda": _as_float,
        "N": _as_int,
        "beta": _as_float,
        "epsilon": _as_float,
        "truncation_tol": _as_float,
        "density": _STR,
        "x0": _as_float,
        "workers": _as_int,
    }
    kv = _take(values, parsers)
    if "lambda" in kv:
        kv["lam"] = kv.pop("lambda")
    return _build(StabilityStudyConfig, kv)


def fractional_config(values: Dict[str, str]) -> FractionalStudyConfig:
    values = dict(values)
    outer = {}
    for key, conv in (("alpha", _as_float), ("caputo_span", _as_float),
                      ("caputo_samples", _as_int)):
        if key in values:
            outer[key] = conv(key, values.pop(key))
    defaults = {"function_id": "flat_at_x0", "operator_kind": "kantorovich",
                "n_grid": "128, 256, 512, 1024", "N": "2"}
    for key, value in defaults.items():
        values.setdefault(key, value)
    outer["convergence"] = convergence_config(values)
    return _build(FractionalStudyConfig, outer)


def cascade_config(values: Dict[str, str]) -> CascadeStudyConfig:
    parsers = {
        "function_id": _STR,
        "depths": lambda k, v: _as_list(k, v, _as_int),
        "n0": _as_int,
        "domain": lambda k, v: _as_list(k, v, _as_float),
        "grid_points": _as_int,
        "x0": _as_float,
        "N": _as_int,
        **_KERNEL_KEYS,
    }
    kv, kernel = _split_kernel(_take(values, parsers))
    if kernel is not None:
        kv["kernel"] = kernel
    if "domain" in kv and len(kv["domain"]) != 2:
        raise ConfigError("domain needs exactly two numbers")
    return _build(CascadeStudyConfig, kv)


def compile_config(values: Dict[str, str]) -> CompileStudyConfig:
    parsers = {
        "function_ids": lambda k, v: _as_list(k, v, lambda kk, vv: vv),
        "params": _as_pairs,
        "n_grid": lambda k, v: _as_list(k, v, _as_int),
        "x_center": _as_float,
        "points": _as_int,
        "truncation_tol": _as_float,
        "tolerance": _as_float,
        "export_dir": _STR,
        "x0": _as_float,
        "N": _as_int,
    }
    return _build(CompileStudyConfig, _take(values, parsers))


def density_config(values: Dict[str, str]) -> DensityCheckConfig:
    parsers = {
        "q_values": lambda k, v: _as_list(k, v, _as_float),
        "lambda_values": lambda k, v: _as_list(k, v, _as_float),
        "half_width": _as_float,
        "quad_tol": _as_float,
        "truncation_tol": _as_float,
        "samples": _as_int,
        "sample_range": _as_float,
        "seed": _as_int,
    }
    return _build(DensityCheckConfig, _take(values, parsers))
