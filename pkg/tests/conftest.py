"""Shared fixtures and independent oracles.

The oracles evaluate the densities straight from the activation's defining
quotient with ``math`` calls and sum lattice series with ``math.fsum`` over a
doubled window, so they share no code path with the package.
"""

import math

import pytest

from tanhops.kernel import ActivationParams, KernelConfig

ACCEPTANCE_LINES = []


def g_oracle(q, lam, x):
    a, b = math.exp(lam * x), q * math.exp(-lam * x)
    return (a - b) / (a + b)


def m_oracle(q, lam, x):
    return 0.25 * (g_oracle(q, lam, x + 1) - g_oracle(q, lam, x - 1))


def phi_oracle(q, lam, x):
    return 0.5 * (m_oracle(q, lam, x) + m_oracle(1.0 / q, lam, x))


def brute_basic(f, x, n, q, lam, W):
    """Basic operator summed with fsum over twice the working window."""
    lo, hi = math.floor(n * x) - 2 * W, math.ceil(n * x) + 2 * W
    return math.fsum(float(f(k / n)) * phi_oracle(q, lam, n * x - k) for k in range(lo, hi + 1))


def brute_moment(j, x, n, q, lam, W):
    lo, hi = math.floor(n * x) - 2 * W, math.ceil(n * x) + 2 * W
    return math.fsum((k / n - x) ** j * phi_oracle(q, lam, n * x - k) for k in range(lo, hi + 1))


@pytest.fixture
def tanh_cfg():
    return KernelConfig.from_values(1.0, 1.0)


@pytest.fixture(params=[(1.0, 1.0), (2.0, 1.0), (0.5, 3.0)], ids=lambda p: f"q{p[0]}-l{p[1]}")
def cfg(request):
    return KernelConfig.from_values(*request.param)


@pytest.fixture
def params():
    return ActivationParams(2.0, 1.5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
