import math

import numpy as np
import pytest

from tanhops.errors import DomainError
from tanhops.functions import builtin, exp_decay, sine
from tanhops.kernel import ActivationParams, KernelConfig
from tanhops.netcompile import (
    HiddenUnit,
    NetworkModel,
    build_cascade,
    compile_basic_operator,
    evaluate_cascade,
    evaluate_network,
    read_network,
    write_network,
)
from tanhops.operators import basic_operator

SETTINGS = [(1.0, 1.0), (2.0, 1.0), (0.5, 3.0)]


class TestEvaluateNetwork:
    def test_single_unit_by_hand(self):
        unit = HiddenUnit(2.0, -1.0, ActivationParams(1, 1), 3.0)
        model = NetworkModel((unit,), 0.5)
        assert evaluate_network(model, 0.8) == pytest.approx(3 * math.tanh(0.6) + 0.5, abs=1e-15)

    def test_empty(self):
        assert evaluate_network(NetworkModel((), 1.25), 3.0) == 1.25


class TestCompile:
    @pytest.mark.parametrize("q,lam", SETTINGS)
    @pytest.mark.parametrize("fid", ["sin", "exp_decay", "poly3"])
    def test_agrees_with_operator_on_window(self, q, lam, fid):
        cfg = KernelConfig.from_values(q, lam)
        f = builtin(fid)
        n, xc = 32, 0.37
        model = compile_basic_operator(f, xc, n, cfg)
        assert model.unit_count == 4 * (2 * cfg.radius_W + 1)
        lo, hi = model.window
        assert lo < xc < hi
        for x in np.linspace(lo, hi, 200):
            assert evaluate_network(model, float(x)) == pytest.approx(
                basic_operator(f, float(x), n, cfg), abs=1e-10)

    def test_plain_density_uses_two_units_per_point(self):
        cfg = KernelConfig.from_values(2.0, 1.0, symmetrized=False)
        model = compile_basic_operator(sine(), 0.1, 16, cfg)
        assert model.unit_count == 2 * (2 * cfg.radius_W + 1)
        lo, hi = model.window
        for x in np.linspace(lo, hi, 25):
            assert evaluate_network(model, float(x)) == pytest.approx(
                basic_operator(sine(), float(x), 16, cfg), abs=1e-10)

    def test_unit_layout(self):
        cfg = KernelConfig.from_values(2.0, 1.5)
        model = compile_basic_operator(sine(), 0.0, 8, cfg)
        first = model.hidden_units[:4]
        assert {u.input_weight for u in first} == {8.0}
        assert {u.activation for u in first} == {cfg.params, cfg.params.inverted()}
        assert math.fsum(u.output_weight for u in first) == 0.0

    def test_rejects_bad_resolution(self, tanh_cfg):
        with pytest.raises(DomainError):
            compile_basic_operator(sine(), 0.0, 0, tanh_cfg)

    def test_export_round_trip(self, tmp_path, tanh_cfg):
        model = compile_basic_operator(exp_decay(), 0.2, 20, tanh_cfg)
        path = tmp_path / "net.txt"
        write_network(model, path)
        back = read_network(path)
        assert back.hidden_units == model.hidden_units
        assert back.output_bias == model.output_bias
        for x in (0.15, 0.2, 0.23):
            assert evaluate_network(back, x) == evaluate_network(model, x)

    def test_export_format(self, tmp_path):
        model = NetworkModel((HiddenUnit(1.0, 0.5, ActivationParams(2.0, 3.0), -0.25),), 0.0)
        path = tmp_path / "one.txt"
        write_network(model, path)
        assert path.read_text() == "1 0\n1 0.5 2 3 -0.25\n"

    def test_read_rejects_mismatched_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 0\n1 0.5 2 3 -0.25\n")
        with pytest.raises(ValueError):
            read_network(path)

    def test_write_to_missing_directory(self, tmp_path, tanh_cfg):
        model = compile_basic_operator(sine(), 0.0, 4, tanh_cfg)
        with pytest.raises(OSError):
            write_network(model, tmp_path / "nope" / "net.txt")


def _sup_error(model, f, m=101):
    xs = np.linspace(model.domain[0], model.domain[1], m)
    return max(abs(evaluate_cascade(model, float(x)) - float(f(float(x)))) for x in xs)


class TestCascade:
    def test_depth_one_is_basic_operator(self, tanh_cfg):
        model = build_cascade(sine(), 1, 8, tanh_cfg)
        for x in (-1.0, -0.3, 0.55, 1.0):
            assert evaluate_cascade(model, x) == pytest.approx(basic_operator(sine(), x, 8, tanh_cfg), abs=1e-15)

    def test_second_stage_corrects_residual(self, tanh_cfg):
        f = sine()
        model = build_cascade(f, 2, 8, tanh_cfg)
        x = 0.3
        # Independent evaluation of h_2 = B_8 f + B_16 (f - B_8 f).
        h1 = lambda t: basic_operator(f, t, 8, tanh_cfg)  # noqa: E731
        from tanhops.functions import SmoothFunction

        resid = SmoothFunction(eval=lambda t: np.vectorize(lambda s: f(s) - h1(s))(t),
                               derivative=lambda j, t: 0.0, max_order=0)
        expected = h1(x) + basic_operator(resid, x, 16, tanh_cfg)
        assert evaluate_cascade(model, x) == pytest.approx(expected, abs=1e-13)

    def test_error_shrinks_with_depth(self, tanh_cfg):
        errs = [_sup_error(build_cascade(sine(), L, 8, tanh_cfg), sine()) for L in (1, 2, 4)]
        assert errs[0] > errs[1] > errs[2]

    def test_outside_domain(self, tanh_cfg):
        model = build_cascade(sine(), 2, 8, tanh_cfg)
        with pytest.raises(DomainError):
            evaluate_cascade(model, 1.01)

    @pytest.mark.parametrize("L,n0", [(0, 8), (2, 3)])
    def test_rejects_bad_schedule(self, tanh_cfg, L, n0):
        with pytest.raises(DomainError):
            build_cascade(sine(), L, n0, tanh_cfg)
