"""Two-type tail comparison and the subsampling bias of the top degree percentile."""

from __future__ import annotations

import numpy as np
from scipy.stats import binom

from ..errors import ConditionFailed, DimensionMismatch, NotTreeCase, ParamError
from ..model import ModelParams, validate_params
from .core import potential, potential_grad, _potential_hess, solve_eta, derived_quantities
from .laws import DegreeLaw
from .linalg import golden_section

_NEGLECT = 1e-13


def _two_type_eta(params: ModelParams) -> float:
    total = float(np.sum(params.pi * params.m))

    def f(y: float) -> float:
        return potential(np.array([y, total - y]), params)

    y = golden_section(f, 0.0, total, tol=1e-12 * total)
    # comparisons of V stall near sqrt(eps); finish with Newton on dV/dy
    for _ in range(50):
        v = np.array([y, total - y])
        g = potential_grad(v, params)
        H = _potential_hess(v, params)
        d1 = g[0] - g[1]
        d2 = H[0, 0] - 2.0 * H[0, 1] + H[1, 1]
        step = d1 / d2
        y_new = min(max(y - step, 0.5 * y), y + 0.5 * (total - y))
        if abs(y_new - y) <= 1e-16 * total:
            y = y_new
            break
        y = y_new
    return float(y)


def heavier_tail_condition(params: ModelParams) -> dict:
    """Whether attribute 0 has the heavier degree tail (larger ``phi^m``).

    Returns the minimizing degree share ``eta_m`` of attribute 0 and the flag.
    Exact ties (up to rounding) count as "not heavier".
    """
    params = validate_params(params)
    if params.K != 2:
        raise DimensionMismatch("heavier_tail_condition needs exactly two attributes")
    eta = _two_type_eta(params)
    p = float(params.pi[0])
    m1, m2 = float(params.m[0]), float(params.m[1])
    total = p * m1 + (1.0 - p) * m2
    lhs = m1 * p * (total - eta)
    rhs = m2 * (1.0 - p) * eta
    return {"eta_m": eta, "minority_heavier": bool(lhs < rhs * (1.0 - 1e-12))}


def _percentile(sf, start: int) -> int:
    """Smallest ``k >= start`` with ``P(Z > k) <= alpha`` given ``sf(k) = P(Z >= k)`` minus alpha."""
    lo = start
    if sf(lo + 1) <= 0:
        return lo
    hi = max(lo + 1, 2 * lo)
    while sf(hi + 1) > 0:
        lo, hi = hi, 2 * hi
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if sf(mid + 1) <= 0:
            hi = mid
        else:
            lo = mid
    return hi


def thinned_pmf(law: DegreeLaw, p: float, jmax: int) -> np.ndarray:
    """``P(Bin(D, p) = j)`` for ``j = 0..jmax`` by exact convolution over ``D``.

    ``D`` is truncated at the first ``K`` where the neglected mass bound
    ``P(D > K) * P(Bin(K + 1, p) <= jmax)`` drops below 1e-13.
    """
    kmax = max(law.support_min, int(np.ceil((jmax + 1) / p)))
    while float(law.sf(kmax + 1)) * float(binom.cdf(jmax, kmax + 1, p)) >= _NEGLECT:
        kmax *= 2
    k = np.arange(law.support_min, kmax + 1)
    pk = law.pmf(k)
    j = np.arange(jmax + 1)
    return binom.pmf(j[:, None], k[None, :], p) @ pk


def bias_limit_details(params: ModelParams, p: float, alpha: float) -> dict:
    params = validate_params(params)
    if params.K != 2:
        raise DimensionMismatch("bias limit needs exactly two attributes")
    if not params.is_tree:
        raise NotTreeCase("bias limit is defined for trees only")
    if params.gamma != 1:
        raise ParamError("bias limit requires gamma = 1")
    if not 0.0 < p <= 1.0:
        raise ParamError("retention probability must lie in (0, 1]")
    if not 0.0 < alpha < 1.0:
        raise ParamError("alpha must lie in (0, 1)")
    eta = solve_eta(params)
    phi = derived_quantities(eta, params)["phi_a"]
    laws = [DegreeLaw(a, 1, float(phi[a]), 1) for a in range(2)]
    w = float(params.pi[0])

    def mix_sf(k):
        return w * float(laws[0].sf(k)) + (1.0 - w) * float(laws[1].sf(k))

    k_alpha = _percentile(lambda k: mix_sf(k) - alpha, 1)
    alpha_t = mix_sf(k_alpha)
    top1 = float(laws[0].sf(k_alpha))
    if p == 1.0:
        k_alpha_p, alpha_tp, top1_p = k_alpha, alpha_t, top1
    else:
        jmax = 64
        while True:
            q1 = thinned_pmf(laws[0], p, jmax)
            q2 = thinned_pmf(laws[1], p, jmax)
            cdf = np.cumsum(w * q1 + (1.0 - w) * q2)
            hit = np.nonzero(cdf >= 1.0 - alpha)[0]
            if hit.size:
                break
            jmax *= 2
        k_alpha_p = int(hit[0])
        alpha_tp = 1.0 - (float(cdf[k_alpha_p - 1]) if k_alpha_p > 0 else 0.0)
        top1_p = 1.0 - float(np.sum(q1[:k_alpha_p]))
    if alpha_t <= alpha or alpha_tp <= alpha:
        raise ConditionFailed(f"percentile mass condition fails (alpha~={alpha_t:.6g}, alpha~_p={alpha_tp:.6g})")
    bias = w * (top1_p / alpha_tp - top1 / alpha_t)
    return {
        "bias": bias,
        "k_alpha": k_alpha,
        "alpha_tilde": alpha_t,
        "k_alpha_p": k_alpha_p,
        "alpha_tilde_p": alpha_tp,
        "share_full": w * top1 / alpha_t,
        "share_sampled": w * top1_p / alpha_tp,
    }


def bias_limit(params: ModelParams, p: float, alpha: float) -> float:
    """Limiting change in the attribute-0 share of the top ``alpha`` degree percentile after thinning."""
    return float(bias_limit_details(params, p, alpha)["bias"])
