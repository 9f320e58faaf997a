"""Large-network attribute laws of the node-sampling schemes, and the rare-minority model."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NotTreeCase, ParamError, SingularSystem
from ..model import ModelParams

SCHEMES = ("uniform", "degree", "in_degree", "pagerank", "fixed_walk", "stationary")


def sampling_limits(sol, params: ModelParams, c: float, walk_len: int | None = None) -> dict[str, np.ndarray]:
    """Limiting attribute pmf of a sampled vertex under each scheme (tree case only).

    ``pagerank`` uses the chain ``S`` stopped after ``Geom(1-c) - 1`` steps,
    ``fixed_walk`` after exactly ``walk_len`` steps, and ``stationary`` is the
    common limit of both as ``c -> 1`` or ``walk_len -> inf``.
    """
    if not params.is_tree:
        raise NotTreeCase("sampling limits are only available for trees (all m_a = 1)")
    if params.gamma != 1:
        raise ParamError("sampling limits require gamma = 1")
    pi = params.pi
    psi = sol.Psi
    P = sol.markov_P
    K = params.K
    w = 1.0 / psi
    try:
        x = np.linalg.solve(np.eye(K) - c * P, w)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    out = {
        "uniform": pi.copy(),
        "degree": np.asarray(sol.eta, dtype=float).copy(),
        "in_degree": pi * sol.phi_a / (2.0 - sol.phi_a),
        "pagerank": pi * psi * (1.0 - c) * x,
        "stationary": pi * psi,
    }
    if walk_len is not None:
        if walk_len < 0:
            raise ParamError("walk length must be non-negative")
        out["fixed_walk"] = pi * psi * (np.linalg.matrix_power(P, int(walk_len)) @ w)
    return out


def rare_minority_params(a: float, D: float) -> ModelParams:
    if not 0.0 < a < 1.0:
        raise ParamError(f"kernel parameter a must lie in (0, 1), got {a}")
    if D <= 0:
        raise ParamError("D must be positive")
    theta = D * math.sqrt(a)
    return ModelParams(pi=np.array([theta, 1.0]) / (1.0 + theta), kappa=np.array([[1.0, 1.0], [a, 1.0]]))


def rare_minority_eta(a: float, D: float) -> float:
    """Minority degree share from the explicit root of the one-dimensional problem."""
    th = D * math.sqrt(a)
    b = 2 * th - a - 3 * th * a
    return (b + math.sqrt(b * b + 4 * th * a * (1 - a) * (1 + 2 * th))) / (2 * (1 - a) * (1 + 2 * th))


def rare_minority_asymptotics(a: float, D: float) -> dict[str, float]:
    """Leading-order minority probabilities as ``a -> 0`` with ``theta = D sqrt(a)``."""
    ra = math.sqrt(a)
    q = 2 * D * D - 0.5
    root = math.sqrt(q * q + 4 * D * D)
    return {
        "uniform": D * ra,
        "degree": 2 * D * ra - (4 * D * D + 0.5) * a,
        "in_degree": 3 * D * ra,
        "stationary": (q + root) / (2 * D * D + 0.5 + root),
    }


def rare_minority(a: float, D: float, c: float = 0.85, walk_len: int | None = None) -> dict[str, dict[str, float]]:
    """Exact minority (attribute 0) probabilities next to their small-``a`` expansions."""
    from .core import solve

    params = rare_minority_params(a, D)
    sol = solve(params, c=c, walk_len=walk_len)
    exact = {k: float(v[0]) for k, v in sol.sampling.items()}
    return {"exact": exact, "asymptotic": rare_minority_asymptotics(a, D), "params": params.to_dict()}
