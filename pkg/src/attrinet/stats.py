"""Empirical census of a generated graph and its comparison with the limits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FringeNotTree, ParamError
from .model import Graph, ModelParams, as_generator, validate_params
from .theory.fringe import FringeTree, canonical_string, fringe_probability


@dataclass
class GraphCensus:
    K: int
    n_vertices: int
    degree_hist: np.ndarray  # K x (max degree + 1)
    attr_counts: np.ndarray
    y_tilde: np.ndarray
    homophily_D: np.ndarray
    heterophily_H: np.ndarray
    max_deg: np.ndarray
    first_deg: np.ndarray
    edge_counts: np.ndarray  # symmetric K x K, unordered attribute pairs
    fringe_cap: int = 0
    fringe_counts: dict[str, int] = field(default_factory=dict)

    def degree_pmf(self, a: int, kmax: int | None = None) -> np.ndarray:
        """Empirical degree pmf of attribute ``a`` on ``0..kmax``."""
        row = self.degree_hist[a]
        kmax = len(row) - 1 if kmax is None else kmax
        out = np.zeros(kmax + 1)
        top = min(kmax + 1, len(row))
        out[:top] = row[:top]
        total = self.attr_counts[a]
        return out / total if total else out

    def to_dict(self) -> dict:
        hist = {
            str(a): {str(k): int(c) for k, c in enumerate(self.degree_hist[a]) if c}
            for a in range(self.K)
        }
        return {
            "K": self.K,
            "n_vertices": self.n_vertices,
            "degree_hist": hist,
            "attr_counts": self.attr_counts.tolist(),
            "y_tilde": self.y_tilde.tolist(),
            "homophily_D": _nan_to_none(self.homophily_D),
            "heterophily_H": _nan_to_none(self.heterophily_H),
            "max_deg": self.max_deg.tolist(),
            "first_deg": _nan_to_none(self.first_deg),
            "edge_counts": self.edge_counts.tolist(),
            "fringe_cap": self.fringe_cap,
            "fringe_counts": dict(sorted(self.fringe_counts.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GraphCensus":
        K = int(d["K"])
        kmax = max((int(k) for row in d["degree_hist"].values() for k in row), default=0)
        hist = np.zeros((K, kmax + 1), dtype=np.int64)
        for a, row in d["degree_hist"].items():
            for k, c in row.items():
                hist[int(a), int(k)] = c
        return cls(
            K=K,
            n_vertices=int(d["n_vertices"]),
            degree_hist=hist,
            attr_counts=np.asarray(d["attr_counts"], dtype=np.int64),
            y_tilde=np.asarray(d["y_tilde"], dtype=float),
            homophily_D=_none_to_nan(d["homophily_D"]),
            heterophily_H=_none_to_nan(d["heterophily_H"]),
            max_deg=np.asarray(d["max_deg"], dtype=np.int64),
            first_deg=_none_to_nan(d["first_deg"]),
            edge_counts=np.asarray(d["edge_counts"], dtype=np.int64),
            fringe_cap=int(d["fringe_cap"]),
            fringe_counts={k: int(v) for k, v in d["fringe_counts"].items()},
        )


def _nan_to_none(x: np.ndarray):
    arr = np.asarray(x, dtype=float)
    return np.where(np.isnan(arr), None, arr).tolist()


def _none_to_nan(x) -> np.ndarray:
    return np.array(x, dtype=float)


def homophily_statistics(attr: np.ndarray, edge_child: np.ndarray, edge_parent: np.ndarray, K: int) -> dict:
    """Within- and between-type edge densities relative to a uniform edge placement."""
    n = len(attr)
    counts = np.bincount(attr, minlength=K).astype(float)
    ea, eb = attr[edge_child], attr[edge_parent]
    E = np.zeros((K, K), dtype=np.int64)
    np.add.at(E, (np.minimum(ea, eb), np.maximum(ea, eb)), 1)
    E = E + np.triu(E, 1).T
    pairs = n * (n - 1) / 2.0
    p_n = len(edge_child) / pairs if pairs > 0 else np.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.diag(E).astype(float) / (counts * (counts - 1) / 2.0 * p_n)
        H = E.astype(float) / (np.outer(counts, counts) * p_n)
    D = np.where(np.isfinite(D), D, np.nan)
    H = np.where(np.isfinite(H), H, np.nan)
    np.fill_diagonal(H, np.nan)
    return {"D": D, "H": H, "edge_counts": E, "p_n": p_n}


def fringe_census(graph: Graph, cap: int) -> dict[str, int]:
    """Count canonical fringes of size at most ``cap`` over all vertices of a tree.

    Vertices are visited youngest first, so every child's encoding is known
    before its parent is reached.
    """
    if not graph.is_tree:
        raise FringeNotTree("fringe census is defined for trees only")
    n = graph.n_vertices
    par = graph.parent()
    attr = graph.attribute
    size = np.ones(n, dtype=np.int64)
    kids: dict[int, list[str]] = {}
    counts: dict[str, int] = {}
    for v in range(n - 1, -1, -1):
        s = int(size[v])
        p = int(par[v])
        if s <= cap:
            code = canonical_string(int(attr[v]), kids.pop(v, ()))
            counts[code] = counts.get(code, 0) + 1
            if p >= 0:
                size[p] += s
                if size[p] <= cap:
                    kids.setdefault(p, []).append(code)
                else:
                    kids.pop(p, None)
        else:
            kids.pop(v, None)
            if p >= 0:
                size[p] += s
                kids.pop(p, None)
    return counts


def census(graph: Graph, fringe_cap: int | None = None, K: int | None = None) -> GraphCensus:
    """Degree, homophily and extreme-degree statistics; fringes when ``fringe_cap`` is set."""
    n = graph.n_vertices
    if n == 0:
        raise ParamError("census of an empty graph")
    K = K or int(graph.attribute.max()) + 1
    attr = graph.attribute.astype(np.int64)
    deg = graph.degree.astype(np.int64)
    hist = np.zeros((K, int(deg.max()) + 1), dtype=np.int64)
    np.add.at(hist, (attr, deg), 1)
    counts = np.bincount(attr, minlength=K)
    y = np.bincount(attr, weights=deg, minlength=K) / (2.0 * n)
    max_deg = np.zeros(K, dtype=np.int64)
    np.maximum.at(max_deg, attr, deg)
    first = np.full(K, np.nan)
    present, idx = np.unique(attr, return_index=True)
    first[present] = deg[idx]
    h = homophily_statistics(attr, graph.edge_child, graph.out_parent, K)
    fringes: dict[str, int] = {}
    cap = int(fringe_cap or 0)
    if cap > 0:
        fringes = fringe_census(graph, cap)
    return GraphCensus(K, n, hist, counts, y, h["D"], h["H"], max_deg, first, h["edge_counts"], cap, fringes)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Half the L1 distance over the common support."""
    k = max(len(p), len(q))
    a = np.zeros(k)
    b = np.zeros(k)
    a[: len(p)] = p
    b[: len(q)] = q
    return 0.5 * float(np.abs(a - b).sum())


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class ConvergenceTrack:
    checkpoints: np.ndarray  # added vertices at each checkpoint
    y_tilde: np.ndarray  # len(checkpoints) x K
    max_deg: np.ndarray
    first_deg: np.ndarray
    first_deg_slope: np.ndarray
    max_deg_slope: np.ndarray

    def to_rows(self) -> list[dict]:
        rows = []
        for i, t in enumerate(self.checkpoints):
            for a in range(self.y_tilde.shape[1]):
                rows.append({
                    "n": int(t),
                    "attribute": a,
                    "y_tilde": float(self.y_tilde[i, a]),
                    "max_deg": int(self.max_deg[i, a]),
                    "first_deg": float(self.first_deg[i, a]),
                })
        return rows


def geometric_checkpoints(n: int, start: int = 16, ratio: float = 2.0) -> np.ndarray:
    pts = []
    t = float(start)
    while t < n:
        pts.append(int(round(t)))
        t *= ratio
    pts.append(int(n))
    return np.unique(np.asarray(pts, dtype=np.int64))


def _loglog_slope(t: np.ndarray, y: np.ndarray, lo: float) -> float:
    sel = (t >= lo) & (y > 0) & np.isfinite(y)
    if sel.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(t[sel]), np.log(y[sel]), 1)[0])


def convergence_track(params: ModelParams, n: int, checkpoints=None, rng=None, seed_graph: Graph | None = None) -> ConvergenceTrack:
    """Grow one graph and replay its history at the checkpoints.

    The graph is append-only, so the state after ``t`` additions is the prefix
    of the first ``n0 + t`` vertices.  Slopes regress ``log F`` and ``log M``
    on ``log t`` over the last decade of checkpoints.
    """
    from .generate import generate_P

    params = validate_params(params)
    if params.gamma != 1:
        raise ParamError("convergence tracking is defined for gamma = 1")
    g = generate_P(params, n, seed_graph=seed_graph, rng=as_generator(rng))
    cps = geometric_checkpoints(n) if checkpoints is None else np.unique(np.asarray(checkpoints, dtype=np.int64))
    if cps.size == 0 or cps[0] < 0 or cps[-1] > n:
        raise ParamError("checkpoints must lie in [0, n]")
    K = params.K
    n0 = g.n_vertices - int(n)
    attr = g.attribute
    child = g.edge_child
    parent = g.out_parent
    deg = g.degree_bonus.copy()
    first_idx = np.full(K, -1, dtype=np.int64)
    Y = np.zeros((len(cps), K))
    Mx = np.zeros((len(cps), K), dtype=np.int64)
    F = np.full((len(cps), K), np.nan)
    done = 0
    for i, t in enumerate(cps):
        upto = n0 + int(t)
        lo_e, hi_e = g.out_ptr[done], g.out_ptr[upto]
        deg += np.bincount(child[lo_e:hi_e], minlength=len(deg))
        deg += np.bincount(parent[lo_e:hi_e], minlength=len(deg))
        for a in range(K):
            if first_idx[a] < 0:
                hit = np.nonzero(attr[done:upto] == a)[0]
                if hit.size:
                    first_idx[a] = done + hit[0]
        done = upto
        a_pre = attr[:upto]
        d_pre = deg[:upto]
        Y[i] = np.bincount(a_pre, weights=d_pre, minlength=K) / (2.0 * upto)
        np.maximum.at(Mx[i], a_pre, d_pre)
        ok = first_idx >= 0
        F[i, ok] = deg[first_idx[ok]]
    t = cps.astype(float)
    lo = t[-1] / 10.0
    f_slope = np.array([_loglog_slope(t, F[:, a], lo) for a in range(K)])
    m_slope = np.array([_loglog_slope(t, Mx[:, a].astype(float), lo) for a in range(K)])
    return ConvergenceTrack(cps, Y, Mx, F, f_slope, m_slope)


# ---------------------------------------------------------------------------
# fringe comparison


@dataclass(frozen=True)
class FringeRow:
    tree: str
    count: int
    empirical: float
    theory: float
    z: float


def compare_fringe(cen: GraphCensus, sol, params: ModelParams) -> list[FringeRow]:
    """One row per realized fringe class; z uses the binomial standard error of the theory value."""
    if cen.fringe_cap <= 0:
        raise ParamError("census carries no fringe counts")
    N = cen.n_vertices
    rows = []
    for code, cnt in sorted(cen.fringe_counts.items(), key=lambda kv: (len(kv[0]), kv[0])):
        t = FringeTree.from_canonical(code)
        theo = fringe_probability(t, sol, params, cap=max(cen.fringe_cap, t.size))
        emp = cnt / N
        se = math.sqrt(theo * (1.0 - theo) / N)
        z = (emp - theo) / se if se > 0 else (0.0 if emp == theo else math.inf)
        rows.append(FringeRow(code, int(cnt), emp, theo, z))
    return rows
