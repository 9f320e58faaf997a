"""Small numerical kernels: Perron eigenpairs and univariate golden-section search."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NoConvergence

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def perron(A: np.ndarray, tol: float = 1e-13, max_iter: int = 200_000) -> tuple[float, np.ndarray]:
    """Perron root and right vector (entries summing to 1) of a positive matrix.

    A dense eigensolve is tried first and kept when its vector passes the
    componentwise residual check.  Otherwise power iteration runs, stopped by
    the Collatz-Wielandt bracket ``min_i (Ax)_i / x_i <= root <= max_i (Ax)_i / x_i``,
    which stays relative per component even when the vector has tiny
    entries.  If the spectral gap is too small for the budget, shifted
    inverse iteration finishes from the current estimate.
    """
    A = np.asarray(A, dtype=float)
    K = A.shape[0]
    if K == 1:
        return float(A[0, 0]), np.ones(1)
    direct = _perron_dense(A, tol)
    if direct is not None:
        return direct
    x = np.full(K, 1.0 / K)
    for _ in range(max_iter):
        y = A @ x
        ratio = y / x
        lo, hi = float(ratio.min()), float(ratio.max())
        x = y / y.sum()
        if hi - lo <= tol * hi:
            break
    else:
        x = _inverse_iteration(A, x, 0.5 * (lo + hi), tol)
    ratio = (A @ x) / x
    lam = float(0.5 * (ratio.min() + ratio.max()))
    if np.any(x <= 0):
        raise NoConvergence("Perron vector has non-positive entries")
    if np.max(np.abs(A @ x - lam * x) / x) > 1e-10 * max(1.0, abs(lam)):
        raise NoConvergence("Perron eigen-iteration did not reach the residual target")
    return lam, x


def _perron_dense(A: np.ndarray, tol: float) -> tuple[float, np.ndarray] | None:
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError:
        return None
    i = int(np.argmax(w.real))
    x = np.abs(V[:, i].real)
    if not np.all(x > 0):
        return None
    x = x / x.sum()
    ratio = (A @ x) / x
    lo, hi = float(ratio.min()), float(ratio.max())
    if hi - lo > max(tol, 1e-12) * hi:
        return None
    return float(0.5 * (lo + hi)), x


def _inverse_iteration(A, x, mu, tol):
    K = A.shape[0]
    eye = np.eye(K)
    for _ in range(50):
        shift = mu * (1.0 + 1e-13) if mu != 0 else 1e-13
        try:
            y = np.linalg.solve(A - shift * eye, x)
        except np.linalg.LinAlgError:
            break
        y = np.abs(y) / np.abs(y).sum()
        ratio = (A @ y) / y
        mu = float(0.5 * (ratio.min() + ratio.max()))
        x = y
        if ratio.max() - ratio.min() <= tol * ratio.max():
            return x
    raise NoConvergence("Perron eigen-iteration exhausted its budget")


def perron_2x2(A: np.ndarray) -> float:
    """Closed-form larger root of a 2x2 characteristic polynomial."""
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return 0.5 * (tr + math.sqrt(max(tr * tr - 4.0 * det, 0.0)))


def golden_section(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 500) -> float:
    """Minimizer of a unimodal ``f`` on ``(lo, hi)``.

    Comparisons of function values stop resolving the minimizer at roughly
    ``sqrt(eps)`` relative precision; callers needing more should polish.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
