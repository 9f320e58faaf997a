"""Limiting degree laws per attribute."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..errors import ParamError


@dataclass(frozen=True)
class DegreeLaw:
    """Limiting degree pmf of a typical vertex of one attribute.

    ``gamma == 1`` gives the power law with exponent ``1 + 2/phi``;
    ``gamma == 0`` gives a geometric law on ``k >= 1``.
    """

    attribute: int
    gamma: int
    phi: float
    support_min: int = 1

    @property
    def tail_exponent(self) -> float:
        """``1 + 2/phi`` for the power law, the success probability for the geometric law."""
        if self.gamma == 1:
            return 1.0 + 2.0 / self.phi
        return self.success_prob

    @property
    def success_prob(self) -> float:
        return 1.0 / (1.0 + self.phi)

    def logpmf(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        out = np.full(k.shape, -np.inf)
        ok = k >= self.support_min
        kk = k[ok]
        if self.gamma == 1:
            r = 2.0 / self.phi
            m = float(self.support_min)
            out[ok] = np.log(r) + gammaln(m + r) + gammaln(kk) - gammaln(kk + 1.0 + r) - gammaln(m)
        else:
            q = self.success_prob
            out[ok] = np.log(q) + (kk - 1.0) * np.log1p(-q)
        return out

    def pmf(self, k) -> np.ndarray:
        return np.exp(self.logpmf(k))

    def sf(self, k) -> np.ndarray:
        """``P(D >= k)`` in closed form (a telescoping product for the power law)."""
        k = np.asarray(k, dtype=float)
        kk = np.maximum(k, self.support_min)
        if self.gamma == 1:
            r = 2.0 / self.phi
            m = float(self.support_min)
            return np.exp(gammaln(m + r) - gammaln(m) + gammaln(kk) - gammaln(kk + r))
        q = self.success_prob
        return np.exp((kk - 1.0) * np.log1p(-q))

    def truncation_point(self, tail_mass: float = 1e-9) -> int:
        """Smallest ``k`` with ``P(D > k) < tail_mass``."""
        lo = self.support_min
        hi = lo
        while self.sf(hi + 1) >= tail_mass:
            hi = 2 * hi + 1
            if hi > 10**15:
                raise ParamError("degree law tail too heavy to truncate")
        while lo < hi:
            mid = (lo + hi) // 2
            if self.sf(mid + 1) < tail_mass:
                hi = mid
            else:
                lo = mid + 1
        return int(lo)

    def pmf_array(self, kmax: int) -> np.ndarray:
        """Probabilities for ``k = 0..kmax`` (zeros below the support)."""
        return self.pmf(np.arange(kmax + 1))


def degree_law(a: int, sol, params) -> DegreeLaw:
    gamma = int(params.gamma)
    phi = float(sol.phi_a[a])
    if gamma == 1:
        return DegreeLaw(attribute=a, gamma=1, phi=phi, support_min=int(params.m[a]))
    return DegreeLaw(attribute=a, gamma=0, phi=phi, support_min=1)


def degree_tail_exponents(sol) -> np.ndarray:
    """Survival exponent ``2/phi_a`` (gamma=1); geometric rate ``-log(1-q)`` (gamma=0)."""
    phi = np.asarray(sol.phi_a, dtype=float)
    if sol.params.gamma == 1:
        return 2.0 / phi
    return -np.log1p(-1.0 / (1.0 + phi))
