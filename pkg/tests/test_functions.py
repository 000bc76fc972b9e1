import math

import numpy as np
import pytest

from tanhops.errors import DomainError
from tanhops.functions import (
    CATALOG,
    POLY3_COEFFS,
    builtin,
    constant,
    exp_decay,
    flat_at,
    linear_combination,
    monomial,
    polynomial,
    shifted,
    sine,
)

POINTS = np.linspace(-1.5, 1.5, 13)


@pytest.mark.parametrize("fid", CATALOG)
def test_catalog_derivatives_match_finite_differences(fid):
    assert builtin(fid).consistency_defect(POINTS) < 1e-6


@pytest.mark.parametrize("fid", CATALOG)
def test_scalar_and_array_agree(fid):
    f = builtin(fid)
    xs = np.linspace(-1, 1, 7)
    arr = f(xs)
    assert isinstance(arr, np.ndarray)
    for j in range(0, f.max_order + 1):
        vec = f.d(j, xs)
        for x, v in zip(xs, vec):
            s = f.d(j, float(x))
            assert isinstance(s, float)
            assert s == pytest.approx(v, rel=1e-14, abs=1e-14)


def test_unknown_catalog_entry():
    with pytest.raises(DomainError):
        builtin("cosh")


def test_order_limits():
    f = sine(max_order=3)
    with pytest.raises(DomainError):
        f.d(4, 0.0)
    with pytest.raises(DomainError):
        f.d(-1, 0.0)
    assert f.d(0, 0.5) == math.sin(0.5)


def test_sine_cycle():
    f = sine()
    assert f.d(1, 0.2) == math.cos(0.2)
    assert f.d(2, 0.2) == -math.sin(0.2)
    assert f.d(5, 0.2) == math.cos(0.2)
    assert f.sup_norm_dN == 1.0


def test_gaussian_derivatives_closed_form():
    f = exp_decay()
    x = 0.7
    e = math.exp(-x * x)
    assert f.d(1, x) == pytest.approx(-2 * x * e, rel=1e-14)
    assert f.d(2, x) == pytest.approx((4 * x * x - 2) * e, rel=1e-14)
    assert f.d(3, x) == pytest.approx((-8 * x ** 3 + 12 * x) * e, rel=1e-14)


def test_poly3_is_the_fixed_cubic():
    f = builtin("poly3")
    x = 0.4
    expected = sum(c * x ** i for i, c in enumerate(POLY3_COEFFS))
    assert f(x) == pytest.approx(expected, rel=1e-15)
    assert f.d(3, x) == pytest.approx(6 * POLY3_COEFFS[3], rel=1e-15)
    assert f.d(4, x) == 0.0


def test_polynomial_top_derivative_norm():
    assert polynomial([1.0, 2.0, 3.0], max_order=2).sup_norm_dN == 6.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_flat_function_has_exact_zero_derivatives(N):
    x0 = 0.3
    f = flat_at(x0, N)
    for j in range(0, N + 1):
        assert f.d(j, x0) == 0.0
    assert f.d(N + 1, x0) == pytest.approx(math.factorial(N + 1) * math.exp(-x0 * x0), rel=1e-14)


def test_flat_function_consistency():
    assert flat_at(-0.2, 3).consistency_defect(POINTS) < 1e-6


def test_monomial_exact_zeros():
    f = monomial(0.3, 3)
    assert f(0.3) == 0.0 and f.d(1, 0.3) == 0.0 and f.d(2, 0.3) == 0.0
    assert f.d(3, 0.3) == 6.0 and f.d(4, 1.0) == 0.0


def test_constant():
    f = constant(2.5)
    assert f(1.0) == 2.5 and f.d(3, 1.0) == 0.0
    assert np.all(f(np.zeros(3)) == 2.5)


def test_linear_combination_and_shift():
    h = linear_combination(2.0, sine(), -1.0, exp_decay())
    x = 0.35
    assert h(x) == pytest.approx(2 * math.sin(x) - math.exp(-x * x), rel=1e-15)
    assert h.d(1, x) == pytest.approx(2 * math.cos(x) + 2 * x * math.exp(-x * x), rel=1e-15)
    s = shifted(sine(), 0.25)
    assert s(1.0) == math.sin(0.75)
    assert s.d(1, np.array([1.0]))[0] == math.cos(0.75)
