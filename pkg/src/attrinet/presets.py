"""Named parameter sets used throughout the test-suite and the command line."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .model import ModelParams


def barabasi_albert() -> ModelParams:
    return ModelParams(pi=np.array([1.0]), kappa=np.array([[1.0]]))


def symmetric() -> ModelParams:
    return ModelParams(pi=np.array([0.5, 0.5]), kappa=np.array([[2.0, 1.0], [1.0, 2.0]]))


def asymmetric() -> ModelParams:
    return ModelParams(pi=np.array([0.2, 0.8]), kappa=np.array([[1.0, 1.0], [0.2, 1.0]]))


def three_type() -> ModelParams:
    return ModelParams(
        pi=np.array([0.2, 0.3, 0.5]),
        kappa=np.array([[1.0, 0.5, 0.8], [0.4, 1.2, 0.6], [0.9, 0.7, 1.0]]),
    )


PRESETS = {
    "ba": barabasi_albert,
    "symmetric": symmetric,
    "asymmetric": asymmetric,
    "three_type": three_type,
}


def preset(name: str) -> ModelParams:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
