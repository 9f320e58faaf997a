"""Exact Page-rank on birth-ordered DAGs and Hill tail-index estimation."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numba
import numpy as np

from .errors import CycleDetected, InsufficientData, ParamError
from .model import Graph


@dataclass
class PageRankScores:
    c: float
    fr: np.ndarray
    n: int

    @property
    def r(self) -> np.ndarray:
        """Graph-normalized score ``n * fR``."""
        return self.n * self.fr

    def to_csv(self, graph: Graph) -> bytes:
        buf = io.StringIO()
        buf.write("id,attribute,fr,r\n")
        r = self.r
        for v in range(self.n):
            buf.write(f"{v},{int(graph.attribute[v])},{self.fr[v]!r},{r[v]!r}\n")
        return buf.getvalue().encode("utf-8")


@numba.njit(cache=True)
def _push_scores(out_ptr, out_parent, c, n):
    fr = np.full(n, (1.0 - c) / n)
    for v in range(n - 1, -1, -1):
        lo = out_ptr[v]
        hi = out_ptr[v + 1]
        d = hi - lo
        if d == 0:
            continue
        share = c * fr[v] / d
        for e in range(lo, hi):
            fr[out_parent[e]] += share
    return fr


def pagerank_exact(graph: Graph, c: float) -> PageRankScores:
    """One pass from the youngest vertex to the oldest.

    Every in-neighbour of ``v`` is younger, so ``fR_v`` is final when ``v`` is
    reached and can be pushed to its parents.  Vertices without out-edges
    simply keep what they receive.
    """
    if not 0.0 < c < 1.0:
        raise ParamError(f"damping c must lie in (0, 1), got {c}")
    n = graph.n_vertices
    if graph.n_edges and np.any(graph.out_parent >= graph.edge_child):
        raise CycleDetected("an edge points to a vertex that is not older; birth order is violated")
    fr = _push_scores(graph.out_ptr.astype(np.int64), graph.out_parent.astype(np.int64), float(c), n)
    return PageRankScores(c=float(c), fr=fr, n=n)


def pagerank_fixed_point(graph: Graph, c: float, tol: float = 1e-14, max_iter: int = 100_000) -> np.ndarray:
    """Iterate the defining equation to a fixed point (reference implementation)."""
    n = graph.n_vertices
    child = graph.edge_child
    w = c / graph.out_degree[child]
    fr = np.full(n, (1.0 - c) / n)
    for _ in range(max_iter):
        new = np.full(n, (1.0 - c) / n)
        np.add.at(new, graph.out_parent, w * fr[child])
        if np.max(np.abs(new - fr)) < tol:
            return new
        fr = new
    return fr


def normalized_totals(scores: PageRankScores, graph: Graph) -> dict:
    n = scores.n
    r = scores.r
    K = int(graph.attribute.max()) + 1 if n else 0
    per = np.bincount(graph.attribute, weights=r, minlength=K) / n
    return {"total": float(r.sum() / n), "per_attribute": per}


def default_hill_k(n: int) -> int:
    return int(min(np.floor(n ** (2.0 / 3.0)), 5000))


@dataclass(frozen=True)
class TailEstimate:
    exponent: float
    ci_halfwidth: float
    k: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.exponent - self.ci_halfwidth, self.exponent + self.ci_halfwidth

    def overlaps(self, other: "TailEstimate") -> bool:
        return self.ci[0] <= other.ci[1] and other.ci[0] <= self.ci[1]


def tail_exponent_estimate(values, k: int | None = None) -> TailEstimate:
    """Hill estimator of the survival-function index over the top ``k`` order statistics."""
    x = np.asarray(values, dtype=float)
    x = x[x > 0]
    if k is None:
        k = default_hill_k(len(x))
    if k < 50:
        raise InsufficientData(f"Hill window k={k} is below the minimum of 50")
    if len(x) < k + 1:
        raise InsufficientData(f"need at least {k + 1} positive values, got {len(x)}")
    top = -np.sort(-x, kind="stable")[: k + 1]
    logs = np.log(top[:k] / top[k])
    mean = float(logs.mean())
    if mean <= 0.0:
        raise InsufficientData("all top order statistics are tied; the Hill estimate is undefined")
    alpha = 1.0 / mean
    return TailEstimate(exponent=alpha, ci_halfwidth=1.96 * alpha / np.sqrt(k), k=int(k))
