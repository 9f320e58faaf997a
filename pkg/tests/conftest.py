from __future__ import annotations

import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from attrinet.model import ModelParams  # noqa: E402
from attrinet.presets import asymmetric, barabasi_albert, symmetric, three_type  # noqa: E402


@pytest.fixture
def ba():
    return barabasi_albert()


@pytest.fixture
def sym():
    return symmetric()


@pytest.fixture
def asym():
    return asymmetric()


@pytest.fixture
def tri():
    return three_type()


def random_params(rng: np.random.Generator, K: int | None = None, tree: bool = True) -> ModelParams:
    K = K or int(rng.integers(1, 6))
    pi = rng.dirichlet(np.ones(K))
    pi = np.maximum(pi, 1e-3)
    pi /= pi.sum()
    kappa = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=(K, K)))
    m = np.ones(K, dtype=np.int64) if tree else rng.integers(1, 4, size=K)
    return ModelParams(pi=pi, kappa=kappa, m=m)
