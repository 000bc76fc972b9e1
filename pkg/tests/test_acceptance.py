"""Acceptance criteria 1-12, each at its stated tolerance and runtime budget.

Every test appends one PASS/FAIL line to ``ACCEPTANCE_LINES``; the lines are
printed in the terminal summary.
"""

import math
import time
from contextlib import contextmanager

import numpy as np

from conftest import ACCEPTANCE_LINES
from tanhops.fractional import CaputoConfig, caputo_left, caputo_polynomial_reference
from tanhops.functions import builtin, constant, monomial, polynomial
from tanhops.harness import config as cfgmod
from tanhops.harness.report import render_csv
from tanhops.harness.studies import (
    fit_loglog_slope,
    run_cascade_study,
    run_convergence_study,
    run_fractional_study,
    run_stability_study,
)
from tanhops.kernel import (
    ActivationParams,
    KernelConfig,
    eval_symmetrized_density,
    integrate_density,
    partition_defect,
    truncation_radius,
)
from tanhops.netcompile import compile_basic_operator, evaluate_network
from tanhops.operators import LEFT_ENDPOINT, basic_operator, kantorovich_operator, quadrature_operator

GRID = [(q, lam) for q in (0.5, 1.0, 2.0) for lam in (1.0, 2.0, 4.0)]
NS = [16, 32, 64, 128, 256, 512, 1024]


@contextmanager
def criterion(number, label, budget):
    start = time.perf_counter()
    detail = {}
    ok = False
    try:
        yield detail
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < budget
        status = "PASS" if ok and within else "FAIL"
        extra = ", ".join(f"{k}={v}" for k, v in detail.items())
        ACCEPTANCE_LINES.append(f"[{status}] {number:>2}. {label} ({elapsed:.2f}s / {budget:g}s)"
                                + (f" {extra}" if extra else ""))
    assert within, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def test_01_density_validity():
    with criterion(1, "density validity", 5) as d:
        rng = np.random.default_rng(1)
        xs = rng.uniform(-30, 30, 1000)
        worst = 0.0
        for q, lam in GRID:
            p = ActivationParams(q, lam)
            for sym in (False, True):
                worst = max(worst, abs(integrate_density(p, 50, 1e-10, symmetrized=sym) - 1.0))
            assert np.all(eval_symmetrized_density(p, xs) > 0)
        d["max_integral_error"] = f"{worst:.2e}"
        assert worst <= 1e-8


def test_02_partition_of_unity():
    with criterion(2, "partition of unity", 5) as d:
        xs = np.random.default_rng(2).uniform(-5, 5, 1000)
        worst = 0.0
        for q, lam in GRID:
            p = ActivationParams(q, lam)
            W = truncation_radius(p, 1e-12)
            worst = max(worst, max(partition_defect(p, float(x), W) for x in xs))
        d["max_defect"] = f"{worst:.2e}"
        assert worst < 1e-10


def test_03_symmetry_and_inversion():
    with criterion(3, "symmetry and q-inversion", 5) as d:
        xs = np.random.default_rng(3).uniform(-20, 20, 1000)
        even = inv = 0.0
        for q, lam in GRID:
            p = ActivationParams(q, lam)
            phi = eval_symmetrized_density(p, xs)
            even = max(even, float(np.max(np.abs(phi - eval_symmetrized_density(p, -xs)))))
            inv = max(inv, float(np.max(np.abs(phi - eval_symmetrized_density(p.inverted(), xs)))))
        d["evenness"] = f"{even:.1e}"
        d["inversion"] = f"{inv:.1e}"
        assert even < 1e-13 and inv <= 1e-15


def test_04_basic_operator_rate():
    with criterion(4, "basic-operator rate", 10) as d:
        rep = run_convergence_study(cfgmod.ConvergenceStudyConfig(function_id="sin", x_points=(0.3,),
                                                                  n_grid=tuple(NS), N=2))
        raw, res = rep.raw_slopes[0.3], rep.residual_slopes[0.3]
        cubic = run_convergence_study(cfgmod.ConvergenceStudyConfig(function_id="poly3", x_points=(0.3,),
                                                                    n_grid=tuple(NS), N=3))
        worst = max(abs(r.residual) for r in cubic.records)
        d["raw_slope"] = f"{raw:.3f}"
        d["residual_slope"] = f"{res:.3f}"
        d["poly3_max_residual"] = f"{worst:.1e}"
        assert raw <= -1 + 0.3
        assert res <= -2 + 0.3
        assert worst < 1e-9


def test_05_vanishing_derivative_clause():
    with criterion(5, "vanishing-derivative clause", 10) as d:
        cfg = cfgmod.ConvergenceStudyConfig(function_id="flat_at_x0", x0=0.3, x_points=(0.3,),
                                            n_grid=(128, 256, 512, 1024), N=2, beta=0.5, epsilon=0.5)
        rep = run_convergence_study(cfg)
        scaled = [r.scaled_residual for r in sorted(rep.records, key=lambda r: r.n)]
        d["scaled"] = "/".join(f"{v:.1e}" for v in scaled)
        assert all(b < a for a, b in zip(scaled, scaled[1:]))


def test_06_kantorovich_identities():
    with criterion(6, "Kantorovich identities", 2) as d:
        cfg = KernelConfig.from_values(1.0, 1.0)
        worst = 0.0
        for n in (10, 20, 40):
            worst = max(worst, abs(kantorovich_operator(constant(3.7), 0.41, n, cfg) - 3.7))
            for k in (0, 1, -3, 7):
                x = k / n
                got = kantorovich_operator(polynomial([0.0, 1.0]), x, n, cfg) - x
                worst = max(worst, abs(got - 1 / (2 * n)))
        f = builtin("sin")
        bitwise = all(quadrature_operator(f, x, n, cfg, LEFT_ENDPOINT) == basic_operator(f, x, n, cfg)
                      for n in (10, 20, 40, 333) for x in (0.3, -0.77, 0.0, 1.234))
        d["max_error"] = f"{worst:.1e}"
        d["bitwise"] = bitwise
        assert worst <= 1e-10 and bitwise


def test_07_stability():
    with criterion(7, "stability", 10) as d:
        rep = run_stability_study(cfgmod.StabilityStudyConfig(function_id="sin", n_grid=(64, 128, 256),
                                                              deltas=(1e-3, 1e-2)))
        ratio = rep.ratios[(64, 1e-3, 1e-2)]
        seq = {delta: [rep.table_D[(delta, n)] for n in (64, 128, 256)] for delta in (1e-3, 1e-2)}
        d["D0"] = rep.zero_difference
        d["ratio"] = f"{ratio:.3f}"
        assert rep.zero_difference == 0.0
        assert 5 <= ratio <= 20
        for values in seq.values():
            assert values[0] > values[1] > values[2]


def test_08_caputo_oracles():
    with criterion(8, "Caputo oracles", 5) as d:
        worst = 0.0
        x0 = 0.0
        for p in (2, 3, 4):
            for alpha in (0.3, 0.5, 1.5, 2.5):
                for dt in (0.25, 1.0, 2.0):
                    got = caputo_left(monomial(x0, p), CaputoConfig(alpha, x0), x0 + dt)
                    # Degree below ceil(alpha): the ceil(alpha)-th derivative vanishes.
                    ref = caputo_polynomial_reference(p, alpha, dt) if p >= math.ceil(alpha) else 0.0
                    worst = max(worst, abs(got - ref))
        const = max(abs(caputo_left(constant(5.0), CaputoConfig(alpha), t))
                    for alpha in (0.3, 0.5, 1.5, 2.5) for t in (0.5, 1.0, 2.0))
        d["max_error"] = f"{worst:.1e}"
        d["constants"] = f"{const:.1e}"
        assert worst <= 1e-6 and const <= 1e-12


def test_09_fractional_limit():
    with criterion(9, "fractional limit statement", 20) as d:
        cfg = cfgmod.fractional_config({"alpha": "1.5", "x0": "0.3", "x_points": "0.3", "N": "2",
                                        "beta": "0.5", "epsilon": "0.5"})
        rep = run_fractional_study(cfg.convergence.function(), 1.5, cfg)
        top = sorted((r for r in rep.rows if r[1] in (512, 1024)), key=lambda r: r[1])
        d["scaled"] = "/".join(f"{r[3]:.1e}" for r in top)
        d["caputo_flag"] = rep.hypothesis_flags[0.3]
        assert top[1][3] < top[0][3]
        assert rep.passed


def test_10_network_compilation():
    with criterion(10, "network compilation", 5) as d:
        worst = 0.0
        counts_ok = True
        for fid in ("sin", "exp_decay", "poly3"):
            f = builtin(fid)
            for q, lam in ((1.0, 1.0), (2.0, 1.0), (0.5, 3.0)):
                cfg = KernelConfig.from_values(q, lam)
                model = compile_basic_operator(f, 0.37, 32, cfg)
                counts_ok &= model.unit_count == 4 * (2 * cfg.radius_W + 1)
                for x in np.linspace(*model.window, 200):
                    worst = max(worst, abs(evaluate_network(model, float(x)) - basic_operator(f, float(x), 32, cfg)))
        d["max_diff"] = f"{worst:.1e}"
        d["unit_counts"] = counts_ok
        assert worst <= 1e-10 and counts_ok


def test_11_depth_curve():
    with criterion(11, "depth curve", 30) as d:
        rep = run_cascade_study(cfgmod.CascadeStudyConfig(function_id="sin", depths=(1, 2, 4, 8, 16)))
        errs = [rep.sup_errors[L] for L in (1, 2, 4, 8, 16)]
        slope = fit_loglog_slope(list(zip((1, 2, 4, 8, 16), errs)))
        d["slope"] = f"{slope:.3f}"
        assert "depth_slope = " in "\n".join(rep.table()[2])
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert slope <= -1


def _criterion_csvs(workers):
    conv = run_convergence_study(cfgmod.ConvergenceStudyConfig(n_grid=tuple(NS), workers=workers))
    stab = run_stability_study(cfgmod.StabilityStudyConfig(workers=workers))
    frac_cfg = cfgmod.fractional_config({"alpha": "1.5", "workers": str(workers)})
    frac = run_fractional_study(frac_cfg.convergence.function(), 1.5, frac_cfg)
    return [render_csv(r).encode() for r in (conv, stab, frac)]


def test_12_determinism():
    with criterion(12, "determinism across worker counts", 60) as d:
        serial = _criterion_csvs(1)
        again = _criterion_csvs(1)
        parallel = _criterion_csvs(4)
        d["identical"] = serial == again == parallel
        assert serial == again == parallel
