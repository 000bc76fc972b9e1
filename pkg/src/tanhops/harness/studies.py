"""Convergence, stability, fractional, depth and compilation studies.

Each ``run_*`` function returns a report whose ``table()`` gives the CSV
columns, the rows in their canonical order and the ``#`` summary lines.
Cells are independent; ``workers > 1`` evaluates them on a thread pool and
the results are gathered back in the canonical order, so output does not
depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tanhops.errors import InsufficientDataError
from tanhops.fractional import CaputoConfig, caputo_left, caputo_right
from tanhops.functions import SmoothFunction, builtin
from tanhops.harness.config import (
    CascadeStudyConfig,
    CompileStudyConfig,
    ConvergenceStudyConfig,
    DensityCheckConfig,
    FractionalStudyConfig,
    StabilityStudyConfig,
)
from tanhops.kernel import (
    ActivationParams,
    KernelConfig,
    compute_decay_bound,
    eval_density,
    eval_symmetrized_density,
    integrate_density,
    partition_defect,
    truncation_radius,
)
from tanhops.netcompile import (
    build_cascade,
    compile_basic_operator,
    evaluate_cascade,
    evaluate_network,
    read_network,
    write_network,
)
from tanhops.operators import (
    apply_operator,
    basic_operator,
    kantorovich_operator,
    kernel_mass_split,
    voronovskaya_residual,
)

NOISE_FLOOR = 1e-14


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fit_loglog_slope(pairs: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``.

    Pairs whose value is not above the noise floor are dropped first.
    """
    usable = [(float(n), float(v)) for n, v in pairs
              if n > 0 and math.isfinite(v) and v > NOISE_FLOOR]
    if len(usable) < 3:
        raise InsufficientDataError(
            f"need at least 3 values above {NOISE_FLOOR:g}, got {len(usable)}")
    xs = [math.log(n) for n, _ in usable]
    ys = [math.log(v) for _, v in usable]
    mx = math.fsum(xs) / len(xs)
    my = math.fsum(ys) / len(ys)
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = math.fsum((a - mx) ** 2 for a in xs)
    return sxy / sxx


def _try_slope(pairs) -> Optional[float]:
    try:
        return fit_loglog_slope(pairs)
    except InsufficientDataError:
        return None


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


# ----------------------------------------------------------------- convergence

@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    x: float
    raw_error: float
    residual: float
    near_mass: float
    far_mass: float
    scaled_residual: float


@dataclass
class ConvergenceReport:
    config: ConvergenceStudyConfig
    records: List[ConvergenceRecord]
    raw_slopes: Dict[float, Optional[float]]
    residual_slopes: Dict[float, Optional[float]]
    composite_exponents: Dict[float, Optional[float]]
    check_values: Dict[float, float]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("x", "n", "raw_error", "residual", "near_mass", "far_mass", "scaled_residual")

    def table(self):
        rows = [(r.x, r.n, r.raw_error, r.residual, r.near_mass, r.far_mass, r.scaled_residual)
                for r in sorted(self.records, key=lambda r: (r.x, r.n))]
        cfg = self.config
        summary = [
            "study = convergence",
            f"function_id = {cfg.function_id}",
            f"operator_kind = {cfg.operator_kind}",
            f"N = {cfg.N}",
            f"beta = {_fmt(cfg.beta)}",
            f"epsilon = {_fmt(cfg.epsilon)}",
            f"rate_exponent = {_fmt(cfg.rate_exponent)}",
        ]
        for x in sorted(self.raw_slopes):
            summary.append(f"x = {_fmt(x)}: raw_slope = {_fmt(self.raw_slopes[x])}, "
                           f"residual_slope = {_fmt(self.residual_slopes[x])}, "
                           f"composite_exponent = {_fmt(self.composite_exponents[x])}, "
                           f"scaled_residual_at_max_n = {_fmt(self.check_values[x])}")
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, rows, summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def convergence_record(cfg: ConvergenceStudyConfig, f: SmoothFunction, x: float,
                       n: int) -> ConvergenceRecord:
    kernel = cfg.kernel
    rule = cfg.quadrature_rule
    raw = apply_operator(cfg.operator_kind, f, x, n, kernel, rule) - f.eval(x)
    residual = voronovskaya_residual(f, x, n, cfg.N, kernel, cfg.operator_kind, rule)
    near, far = kernel_mass_split(x, n, cfg.beta, kernel)
    return ConvergenceRecord(n, x, raw, residual, near, far, n ** cfg.rate_exponent * abs(residual))


def run_convergence_study(cfg: ConvergenceStudyConfig) -> ConvergenceReport:
    f = cfg.function()
    cells = [(x, n) for x in sorted(cfg.x_points) for n in cfg.n_grid]
    records = _map(lambda c: convergence_record(cfg, f, c[0], c[1]), cells, cfg.workers)
    raw_slopes, res_slopes, composite, check_values = {}, {}, {}, {}
    checks: Dict[str, bool] = {}
    for x in sorted(cfg.x_points):
        rows = [r for r in records if r.x == x]
        raw_slopes[x] = _try_slope([(r.n, abs(r.raw_error)) for r in rows])
        res_slopes[x] = _try_slope([(r.n, abs(r.residual)) for r in rows])
        # Exponent against the composite scale s_n = 1/n + n^-beta.
        comp = _try_slope([(1.0 / (1.0 / r.n + r.n ** -cfg.beta), abs(r.residual)) for r in rows])
        composite[x] = None if comp is None else -comp
        check_values[x] = rows[-1].scaled_residual
        noise = res_slopes[x] is None
        tag = f"x={_fmt(x)}"
        checks[f"residual_rate[{tag}]"] = noise or res_slopes[x] <= -cfg.rate_exponent
        checks[f"scaled_residual_shrinks[{tag}]"] = (
            noise or rows[-1].scaled_residual <= rows[0].scaled_residual)
    checks["near_far_mass_sums_to_one"] = all(
        abs(r.near_mass + r.far_mass - 1.0) <= 1e-9 for r in records)
    return ConvergenceReport(cfg, records, raw_slopes, res_slopes, composite, check_values, checks)


# ------------------------------------------------------------------- stability

def sup_difference(f: SmoothFunction, x_points, n: int, delta: float,
                   cfg: StabilityStudyConfig) -> float:
    """``max_x |C_n(f, x; q=1+delta) - C_n(f, x; q=1)|``."""
    perturbed = cfg.kernel_for(1.0 + delta)
    reference = cfg.kernel_for(1.0)
    return max(abs(kantorovich_operator(f, x, n, perturbed) - kantorovich_operator(f, x, n, reference))
               for x in x_points)


@dataclass
class StabilityReport:
    config: StabilityStudyConfig
    table_D: Dict[Tuple[float, int], float]
    fitted_K: float
    ratios: Dict[Tuple[int, float, float], float]
    zero_difference: float
    derivative_bound_holds: Optional[bool]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("delta", "n", "sup_difference", "bound_rhs")

    def bound_rhs(self, delta: float, n: int) -> float:
        return delta * self.fitted_K / n ** self.config.rate_exponent

    def table(self):
        rows = [(d, n, D, self.bound_rhs(d, n)) for (d, n), D in sorted(self.table_D.items())]
        cfg = self.config
        summary = [
            "study = stability",
            f"function_id = {cfg.function_id}",
            f"density = {cfg.density}",
            f"lambda = {_fmt(cfg.lam)}",
            f"rate_exponent = {_fmt(cfg.rate_exponent)}",
            f"fitted_K = {_fmt(self.fitted_K)}",
            f"sup_difference_at_delta_0 = {_fmt(self.zero_difference)}",
            f"derivative_bound_holds = {_fmt(self.derivative_bound_holds)}",
        ]
        for (n, d1, d2), ratio in sorted(self.ratios.items()):
            summary.append(f"ratio n = {n}: D({_fmt(d2)})/D({_fmt(d1)}) = {_fmt(ratio)}")
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, rows, summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def run_stability_study(cfg: StabilityStudyConfig) -> StabilityReport:
    f = cfg.function()
    cells = [(d, n) for d in cfg.deltas for n in cfg.n_grid]
    values = _map(lambda c: sup_difference(f, cfg.x_points, c[1], c[0], cfg), cells, cfg.workers)
    table_D = dict(zip(cells, values))
    rate = cfg.rate_exponent
    fitted_K = max(D * n ** rate / d for (d, n), D in table_D.items())
    zero = sup_difference(f, cfg.x_points, cfg.n_grid[0], 0.0, cfg)
    ratios = {}
    checks = {"zero_perturbation_gives_zero": zero == 0.0}
    for n in cfg.n_grid:
        for i, d1 in enumerate(cfg.deltas):
            for d2 in cfg.deltas[i + 1:]:
                r = table_D[(d2, n)] / table_D[(d1, n)] if table_D[(d1, n)] > 0 else math.inf
                ratios[(n, d1, d2)] = r
                # First order in delta: the ratio tracks d2/d1 within a factor of two.
                scale = d2 / d1
                checks[f"first_order_ratio[n={n},{_fmt(d1)}->{_fmt(d2)}]"] = \
                    0.5 * scale <= r <= 2.0 * scale
    for d in cfg.deltas:
        seq = [table_D[(d, n)] for n in cfg.n_grid]
        checks[f"decreasing_in_n[delta={_fmt(d)}]"] = all(b < a for a, b in zip(seq, seq[1:]))
    derivative_bound = None
    if f.sup_norm_dN is not None:
        derivative_bound = all(D <= d * f.sup_norm_dN / n ** rate for (d, n), D in table_D.items())
    return StabilityReport(cfg, table_D, fitted_K, ratios, zero, derivative_bound, checks)


# ------------------------------------------------------------------ fractional

@dataclass
class FractionalReport:
    config: FractionalStudyConfig
    rows: List[Tuple[float, int, float, float]]
    caputo: Dict[float, Dict[str, float]]
    hypothesis_flags: Dict[float, bool]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("x", "n", "raw_error", "scaled_error")

    def table(self):
        cfg = self.config
        conv = cfg.convergence
        summary = [
            "study = fractional",
            f"function_id = {conv.function_id}",
            f"alpha = {_fmt(cfg.alpha)}",
            f"N = {conv.N}",
            f"rate_exponent = {_fmt(conv.rate_exponent)}",
        ]
        for x in sorted(self.caputo):
            est = self.caputo[x]
            summary.append(
                f"x = {_fmt(x)}: sup_left_caputo = {_fmt(est['left'])}, "
                f"sup_right_caputo = {_fmt(est['right'])}, "
                f"sup_left_caputo_wide = {_fmt(est['left_wide'])}, "
                f"sup_right_caputo_wide = {_fmt(est['right_wide'])}, "
                f"hypothesis_flag = {'flagged' if self.hypothesis_flags[x] else 'ok'}")
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, sorted(self.rows), summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _caputo_sup(f: SmoothFunction, cfg: CaputoConfig, span: float, samples: int, side: str) -> float:
    best = 0.0
    for i in range(1, samples):
        h = span * i / (samples - 1)
        if side == "left":
            v = caputo_left(f, cfg, cfg.base_point + h)
        else:
            v = caputo_right(f, cfg, cfg.base_point - h)
        best = max(best, abs(v))
    return best


def run_fractional_study(f: SmoothFunction, alpha: float,
                         cfg: ConvergenceStudyConfig | FractionalStudyConfig) -> FractionalReport:
    """Scaled Kantorovich error ``n^{beta(N-eps)} |C_n f(x) - f(x)|`` with Caputo bounds.

    The scaled error must decrease over the upper half of the ``n`` grid.
    Caputo sup-norms are estimated on ``[x, x+span]`` and ``[x-span, x]`` and
    again on twice the span; growth by more than a factor of ten flags the
    finiteness hypothesis without failing the study.
    """
    if isinstance(cfg, FractionalStudyConfig):
        frac = cfg
    else:
        frac = FractionalStudyConfig(alpha=alpha, convergence=cfg)
    conv = frac.convergence
    rate = conv.rate_exponent
    cells = [(x, n) for x in sorted(conv.x_points) for n in conv.n_grid]

    def cell(c):
        x, n = c
        raw = kantorovich_operator(f, x, n, conv.kernel) - f.eval(x)
        return (x, n, raw, n ** rate * abs(raw))

    rows = _map(cell, cells, conv.workers)
    checks: Dict[str, bool] = {}
    caputo: Dict[float, Dict[str, float]] = {}
    flags: Dict[float, bool] = {}
    top = conv.n_grid[len(conv.n_grid) // 2:]
    for x in sorted(conv.x_points):
        seq = [r for r in rows if r[0] == x and r[1] in top]
        at_floor = all(abs(r[2]) <= NOISE_FLOOR for r in seq)
        checks[f"scaled_error_decreasing[x={_fmt(x)}]"] = at_floor or all(
            b[3] < a[3] for a, b in zip(seq, seq[1:]))
        ccfg = CaputoConfig(alpha, base_point=x)
        span, m = frac.caputo_span, frac.caputo_samples
        est = {
            "left": _caputo_sup(f, ccfg, span, m, "left"),
            "right": _caputo_sup(f, ccfg, span, m, "right"),
            "left_wide": _caputo_sup(f, ccfg, 2 * span, 2 * m - 1, "left"),
            "right_wide": _caputo_sup(f, ccfg, 2 * span, 2 * m - 1, "right"),
        }
        caputo[x] = est
        flags[x] = not all(math.isfinite(v) for v in est.values()) or (
            est["left_wide"] > 10 * est["left"] + 1e-12
            or est["right_wide"] > 10 * est["right"] + 1e-12)
    return FractionalReport(frac, rows, caputo, flags, checks)


# ----------------------------------------------------------------------- depth

@dataclass
class CascadeReport:
    config: CascadeStudyConfig
    sup_errors: Dict[int, float]
    slopes_so_far: Dict[int, Optional[float]]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("L", "sup_error", "fitted_slope_so_far")

    @property
    def slope(self) -> Optional[float]:
        return self.slopes_so_far[max(self.slopes_so_far)]

    def table(self):
        rows = [(L, self.sup_errors[L], self.slopes_so_far[L]) for L in sorted(self.sup_errors)]
        cfg = self.config
        summary = [
            "study = cascade",
            f"function_id = {cfg.function_id}",
            f"n0 = {cfg.n0}",
            "schedule = n_l = n0 * l",
            f"depth_slope = {_fmt(self.slope)}",
        ]
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, rows, summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def cascade_sup_error(f: SmoothFunction, L: int, n0: int, kernel, domain, grid_points: int) -> float:
    model = build_cascade(f, L, n0, kernel, domain)
    grid = np.linspace(domain[0], domain[1], grid_points)
    return max(abs(evaluate_cascade(model, float(x)) - float(f.eval(float(x)))) for x in grid)


def run_cascade_study(cfg: CascadeStudyConfig) -> CascadeReport:
    f = cfg.function()
    errors = {L: cascade_sup_error(f, L, cfg.n0, cfg.kernel, cfg.domain, cfg.grid_points)
              for L in cfg.depths}
    slopes = {}
    for i, L in enumerate(cfg.depths):
        slopes[L] = _try_slope([(d, errors[d]) for d in cfg.depths[: i + 1]])
    seq = [errors[L] for L in cfg.depths]
    checks = {
        "sup_error_non_increasing": all(b <= a + 1e-12 for a, b in zip(seq, seq[1:])),
    }
    final = slopes[cfg.depths[-1]]
    # Everything at the noise floor already counts as converged.
    checks["depth_slope_at_most_-1"] = final <= -1.0 if final is not None else max(seq) <= NOISE_FLOOR
    return CascadeReport(cfg, errors, slopes, checks)


# ------------------------------------------------------------------ compilation

@dataclass
class CompileReport:
    config: CompileStudyConfig
    rows: List[tuple]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("function_id", "q", "lambda", "n", "units", "expected_units", "max_abs_diff",
               "window_lo", "window_hi")

    def table(self):
        summary = ["study = compile-net", f"tolerance = {_fmt(self.config.tolerance)}"]
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, list(self.rows), summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def run_compile_study(cfg: CompileStudyConfig) -> CompileReport:
    rows, checks = [], {}
    for fid in cfg.function_ids:
        f = builtin(fid, N=cfg.N, x0=cfg.x0)
        for q, lam in cfg.params:
            kernel = KernelConfig.from_values(q, lam, cfg.truncation_tol)
            for n in cfg.n_grid:
                model = compile_basic_operator(f, cfg.x_center, n, kernel)
                lo, hi = model.window
                xs = np.linspace(lo, hi, cfg.points)
                diffs = [abs(evaluate_network(model, float(x)) - basic_operator(f, float(x), n, kernel))
                         for x in xs]
                scale = max(1.0, max(abs(float(f.eval(float(x)))) for x in xs))
                expected = 4 * (2 * kernel.radius_W + 1)
                tag = f"{fid},q={_fmt(float(q))},lambda={_fmt(float(lam))},n={n}"
                checks[f"agreement[{tag}]"] = max(diffs) <= cfg.tolerance * scale
                checks[f"unit_count[{tag}]"] = model.unit_count == expected
                if cfg.export_dir:
                    os.makedirs(cfg.export_dir, exist_ok=True)
                    path = os.path.join(cfg.export_dir, f"net_{fid}_q{q:g}_l{lam:g}_n{n}.txt")
                    write_network(model, path)
                    back = read_network(path)
                    checks[f"roundtrip[{tag}]"] = all(
                        evaluate_network(back, float(x)) == evaluate_network(model, float(x))
                        for x in xs[:: max(1, len(xs) // 10)])
                rows.append((fid, float(q), float(lam), n, model.unit_count, expected,
                             max(diffs), lo, hi))
    return CompileReport(cfg, rows, checks)


# --------------------------------------------------------------------- density

@dataclass
class DensityReport:
    config: DensityCheckConfig
    rows: List[tuple]
    checks: Dict[str, bool] = field(default_factory=dict)

    columns = ("q", "lambda", "W", "integral_M", "integral_Phi", "min_density",
               "max_partition_defect", "max_evenness_gap", "max_inversion_gap", "max_decay_ratio")

    def table(self):
        summary = ["study = density-check"]
        summary.extend(f"check {name} = {'pass' if ok else 'FAIL'}"
                       for name, ok in sorted(self.checks.items()))
        return self.columns, list(self.rows), summary

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def run_density_check(cfg: DensityCheckConfig) -> DensityReport:
    rng = np.random.default_rng(cfg.seed)
    wide = rng.uniform(-30.0, 30.0, cfg.samples)
    near = rng.uniform(-cfg.sample_range, cfg.sample_range, cfg.samples)
    tails = np.concatenate([np.linspace(2.0, 40.0, 381), -np.linspace(2.0, 40.0, 381)])
    rows, checks = [], {}
    for q in cfg.q_values:
        for lam in cfg.lambda_values:
            p = ActivationParams(q, lam)
            W = truncation_radius(p, cfg.truncation_tol)
            int_m = integrate_density(p, cfg.half_width, cfg.quad_tol, symmetrized=False)
            int_phi = integrate_density(p, cfg.half_width, cfg.quad_tol)
            phi = eval_symmetrized_density(p, wide)
            min_density = float(min(phi.min(), eval_density(p, wide).min()))
            defect = max(partition_defect(p, float(x), W) for x in near)
            even = float(np.max(np.abs(phi - eval_symmetrized_density(p, -wide))))
            inv = float(np.max(np.abs(phi - eval_symmetrized_density(p.inverted(), wide))))
            decay = compute_decay_bound(p)
            ratio = float(np.max(eval_symmetrized_density(p, tails) / decay(tails)))
            tag = f"q={_fmt(float(q))},lambda={_fmt(float(lam))}"
            checks[f"normalization[{tag}]"] = abs(int_m - 1) <= 1e-8 and abs(int_phi - 1) <= 1e-8
            checks[f"positivity[{tag}]"] = min_density > 0
            checks[f"partition_of_unity[{tag}]"] = defect < 1e-10
            checks[f"evenness[{tag}]"] = even < 1e-13
            checks[f"q_inversion[{tag}]"] = inv <= 1e-15
            checks[f"decay_domination[{tag}]"] = ratio <= 1.0
            rows.append((float(q), float(lam), W, int_m, int_phi, min_density, defect, even, inv, ratio))
    return DensityReport(cfg, rows, checks)
