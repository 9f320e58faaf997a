"""Closed-form limit objects: the degree-share minimizer, reproduction rates, spectral data.

Everything here is a pure function of a validated :class:`ModelParams`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from ..errors import NoConvergence, ParamError, SingularSystem
from ..model import ModelParams, validate_params
from .linalg import perron

STATIONARITY_TOL = 1e-12


def potential(y: np.ndarray, params: ModelParams) -> float:
    """``sum(y) - 1/2 sum_j m_j pi_j (log y_j + log (kappa^T y)_j)``.

    With ``m = 1`` this differs from the simplex potential only by the constant
    ``sum(y) - 1``, so both share the minimizer on the simplex.
    """
    w = params.m * params.pi
    return float(y.sum() - 0.5 * np.sum(w * (np.log(y) + np.log(params.kappa.T @ y))))


def potential_grad(y: np.ndarray, params: ModelParams) -> np.ndarray:
    w = params.m * params.pi
    return 1.0 - 0.5 * (w / y + params.kappa @ (w / (params.kappa.T @ y)))


def _potential_hess(y: np.ndarray, params: ModelParams) -> np.ndarray:
    w = params.m * params.pi
    s = params.kappa.T @ y
    k = params.kappa
    return 0.5 * np.diag(w / y**2) + 0.5 * (k * (w / s**2)) @ k.T


def stationarity_residual(eta: np.ndarray, params: ModelParams) -> float:
    return float(np.max(np.abs(eta * potential_grad(eta, params))))


def solve_eta(params: ModelParams, max_iter: int = 500) -> np.ndarray:
    """Unique minimizer of the degree-share potential.

    The unconstrained stationary point automatically satisfies
    ``sum(eta) = sum(pi * m)`` (multiply the gradient by ``y`` and sum), so a
    damped Newton method on the open orthant suffices.
    """
    params = validate_params(params)
    if params.K == 1:
        return np.array([float(params.m[0] * params.pi[0])])
    y = params.m * params.pi
    f = potential(y, params)
    polish = 0
    for _ in range(max_iter):
        g = potential_grad(y, params)
        # a couple of extra Newton steps once converged push to rounding level
        if np.max(np.abs(y * g)) < 0.1 * STATIONARITY_TOL:
            polish += 1
            if polish > 2 or np.max(np.abs(y * g)) == 0.0:
                break
        H = _potential_hess(y, params)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = -g
        t = 1.0
        neg = step < 0
        if np.any(neg):
            t = min(1.0, 0.99 * float(np.min(-y[neg] / step[neg])))
        slope = float(g @ step)
        res = float(np.max(np.abs(y * g)))
        # near the minimizer potential differences drown in rounding, so a
        # shrinking stationarity residual is accepted instead
        local = res < 1e-6
        while True:
            y_new = y + t * step
            f_new = potential(y_new, params)
            if f_new <= f + 1e-4 * t * slope or t < 1e-16:
                break
            if local and np.all(y_new > 0) and stationarity_residual(y_new, params) < res:
                break
            t *= 0.5
        improved = f_new <= f or (local and stationarity_residual(y_new, params) < res)
        if not improved and (t < 1e-16 or polish):
            break
        y, f = y_new, f_new
    res = stationarity_residual(y, params)
    if res >= STATIONARITY_TOL:
        raise NoConvergence(f"eta stationarity residual {res:.3e} after {max_iter} iterations")
    return y


def derived_quantities(eta: np.ndarray, params: ModelParams) -> dict[str, np.ndarray]:
    """``nu``, ``phi_ab`` and ``phi_a`` from the minimizer (out-degree weighted for non-trees)."""
    eta = np.asarray(eta, dtype=float)
    nu = params.pi / (params.kappa.T @ eta)
    phi_ab = params.kappa * (params.m * nu)[None, :]
    return {"nu": nu, "phi_ab": phi_ab, "phi_a": phi_ab.sum(axis=1)}


def chi_phi_gamma0(params: ModelParams) -> dict[str, np.ndarray]:
    """Uniform-attachment analogues: ``chi_b = pi_b / sum_a pi_a kappa_ab``."""
    chi = params.pi / (params.pi @ params.kappa)
    varphi_ab = params.kappa * chi[None, :]
    return {"chi": chi, "varphi_ab": varphi_ab, "varphi_a": varphi_ab.sum(axis=1)}


def spectral_data(phi_ab: np.ndarray, phi_a: np.ndarray, params: ModelParams, c: float) -> dict[str, Any]:
    if not 0.0 < c < 1.0:
        raise ParamError(f"damping c must lie in (0, 1), got {c}")
    m = params.m.astype(float)
    M = phi_ab / (2.0 - phi_a)[:, None]
    Mc = c * phi_ab * (m[:, None] / m[None, :]) + np.diag(phi_a)
    lambda_c, h = perron(Mc)
    if params.is_tree:
        # the root of M is exactly 1 here; a bordered solve stays accurate when
        # the spectral gap is tiny (rare attributes), where iteration stalls
        root_M = 1.0
        psi = _unit_eigvec(M, params.pi)
    else:
        root_M, psi = perron(M)
        psi = psi / float(params.pi @ psi)
    P = M * psi[None, :] / psi[:, None] / root_M
    return {"M": M, "Mc": Mc, "lambda_c": lambda_c, "h": h, "Psi": psi, "markov_P": P, "M_root": root_M}


def _unit_eigvec(M: np.ndarray, pi: np.ndarray) -> np.ndarray:
    K = M.shape[0]
    A = np.vstack([M - np.eye(K), pi[None, :]])
    b = np.zeros(K + 1)
    b[-1] = 1.0
    psi = np.linalg.lstsq(A, b, rcond=None)[0]
    if np.any(psi <= 0):
        raise NoConvergence("unit eigenvector of M has non-positive entries")
    return psi


def expected_pagerank_linear(spec: dict[str, Any], params: ModelParams, c: float) -> np.ndarray:
    """Mean limiting normalized Page-rank per root type via a linear solve.

    Trees use the geometric-stopped chain: ``(I - cP) x = 1/Psi``,
    ``E_a = (1 - c) Psi_a x_a``.  Non-trees weight a path from type ``b`` to
    the root type ``a`` by ``m_a / m_b``: ``E = (1 - c) m * (I - cM)^{-1} (1/m)``.
    """
    K = params.K
    try:
        if params.is_tree:
            psi = spec["Psi"]
            x = np.linalg.solve(np.eye(K) - c * spec["markov_P"], 1.0 / psi)
            return (1.0 - c) * psi * x
        m = params.m.astype(float)
        y = np.linalg.solve(np.eye(K) - c * spec["M"], 1.0 / m)
        return (1.0 - c) * m * y
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None


def expected_pagerank_series(spec: dict[str, Any], params: ModelParams, c: float, tol: float = 1e-14) -> tuple[np.ndarray, int]:
    """Truncated path series; returns the estimate and the number of terms used.

    Partial sums double in length by squaring: with ``A = cM``,
    ``S_2N = S_N + A^N S_N``.  The tail past ``N`` terms is bounded by
    ``|A^N| |S_N| / (1 - |A^N|)`` in the max-row-sum norm.
    """
    A = c * np.asarray(spec["M"], dtype=float)
    m = params.m.astype(float)
    K = A.shape[0]
    S = np.eye(K)
    P = A.copy()
    n = 1
    for _ in range(64):
        S = S + P @ S
        P = P @ P
        n *= 2
        p_norm = float(np.abs(P).sum(axis=1).max())
        if p_norm < 0.5 and p_norm * float(np.abs(S).sum(axis=1).max()) / (1.0 - p_norm) < tol:
            break
    else:
        raise NoConvergence("Page-rank path series did not converge")
    return (1.0 - c) * m * (S @ (1.0 / m)), n


def expected_pagerank(spec: dict[str, Any], params: ModelParams, c: float) -> np.ndarray:
    """Authoritative linear-system value, cross-checked against the series to 1e-9."""
    lin = expected_pagerank_linear(spec, params, c)
    ser, _ = expected_pagerank_series(spec, params, c)
    if np.max(np.abs(lin - ser)) > 1e-9 * max(1.0, float(np.max(np.abs(lin)))):
        raise SingularSystem("linear-system and series expected Page-rank disagree")
    return lin


def pagerank_tail_exponent(lambda_c: float | None, gamma: int, c: float) -> float:
    """Survival-function exponent of the limiting normalized Page-rank."""
    if gamma == 0:
        return 1.0 / c
    return 2.0 / lambda_c


def homophily_limits(M: np.ndarray, pi: np.ndarray) -> dict[str, np.ndarray]:
    D = np.diag(M) / pi
    H = 0.5 * (M.T / pi[:, None] + M / pi[None, :])
    np.fill_diagonal(H, np.nan)
    return {"D": D, "H": H}


@dataclass
class TheorySolution:
    """Every closed-form limit object for one parameter set and damping ``c``."""

    params: ModelParams
    c: float
    eta: np.ndarray | None = None
    nu: np.ndarray | None = None
    phi_ab: np.ndarray | None = None
    phi_a: np.ndarray | None = None
    M: np.ndarray | None = None
    Mc: np.ndarray | None = None
    lambda_c: float | None = None
    h: np.ndarray | None = None
    Psi: np.ndarray | None = None
    markov_P: np.ndarray | None = None
    expected_pr: np.ndarray | None = None
    pagerank_tail_exponent: float | None = None
    degree_tail_exponent: np.ndarray | None = None
    homophily_D: np.ndarray | None = None
    heterophily_H: np.ndarray | None = None
    sampling: dict[str, np.ndarray] = field(default_factory=dict)
    chi: np.ndarray | None = None

    @property
    def nu_normalized(self) -> np.ndarray | None:
        return None if self.nu is None else self.nu / self.nu.sum()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"params": self.params.to_dict(), "param_hash": self.params.param_hash()}
        for f in fields(self):
            if f.name == "params":
                continue
            out[f.name] = _jsonable(getattr(self, f.name))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_fmt17)


def _fmt17(x):
    return float(x)


def _jsonable(v):
    if v is None:
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if not np.isfinite(f):
            return None
        return float(format(f, ".17g"))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def solve(params: ModelParams, c: float = 0.85, walk_len: int | None = None) -> TheorySolution:
    """Run the whole theory pipeline that applies to ``params``."""
    from .laws import degree_tail_exponents
    from .sampling import sampling_limits

    params = validate_params(params)
    sol = TheorySolution(params=params, c=c)
    if params.gamma == 0:
        q = chi_phi_gamma0(params)
        sol.chi, sol.phi_ab, sol.phi_a = q["chi"], q["varphi_ab"], q["varphi_a"]
        sol.pagerank_tail_exponent = pagerank_tail_exponent(None, 0, c)
        sol.degree_tail_exponent = degree_tail_exponents(sol)
        return sol
    sol.eta = solve_eta(params)
    d = derived_quantities(sol.eta, params)
    sol.nu, sol.phi_ab, sol.phi_a = d["nu"], d["phi_ab"], d["phi_a"]
    spec = spectral_data(sol.phi_ab, sol.phi_a, params, c)
    sol.M, sol.Mc, sol.lambda_c, sol.h = spec["M"], spec["Mc"], spec["lambda_c"], spec["h"]
    sol.Psi, sol.markov_P = spec["Psi"], spec["markov_P"]
    sol.expected_pr = expected_pagerank(spec, params, c)
    sol.pagerank_tail_exponent = pagerank_tail_exponent(sol.lambda_c, 1, c)
    sol.degree_tail_exponent = degree_tail_exponents(sol)
    if params.is_tree:
        hl = homophily_limits(sol.M, params.pi)
        sol.homophily_D, sol.heterophily_H = hl["D"], hl["H"]
        sol.sampling = sampling_limits(sol, params, c, walk_len)
    return sol
