"""Symmetrized perturbed-tanh neural network operators and their convergence studies."""

from tanhops.errors import ConfigError, DomainError, InsufficientDataError, QuadratureError
from tanhops.kernel import ActivationParams, KernelConfig, KernelDecayBound

__all__ = [
    "ActivationParams",
    "ConfigError",
    "DomainError",
    "InsufficientDataError",
    "KernelConfig",
    "KernelDecayBound",
    "QuadratureError",
]
