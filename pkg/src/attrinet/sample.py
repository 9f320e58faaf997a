"""Node-sampling schemes, subgraph sampling, and the top-percentile bias statistic."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotTreeCase, ParamError
from .model import Graph, as_generator

NODE_SCHEMES = ("uniform", "degree", "neighbor", "in_degree", "pagerank_walk", "fixed_walk")
SUBGRAPH_SCHEMES = ("induced_nodes", "incident_edges")


@dataclass(frozen=True)
class SchemeSpec:
    kind: str
    c: float | None = None
    M: int | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in NODE_SCHEMES + SUBGRAPH_SCHEMES:
            raise ParamError(f"unknown sampling scheme {self.kind!r}")
        if self.kind == "pagerank_walk" and (self.c is None or not 0.0 < self.c < 1.0):
            raise ParamError("pagerank_walk needs damping c in (0, 1)")
        if self.kind == "fixed_walk" and (self.M is None or self.M < 0):
            raise ParamError("fixed_walk needs a walk length M >= 0")
        if self.kind in SUBGRAPH_SCHEMES and (self.p is None or not 0.0 < self.p <= 1.0):
            raise ParamError(f"{self.kind} needs a retention probability p in (0, 1]")

    @property
    def theory_key(self) -> str | None:
        """Key of the limiting frequency in the sampling limits; ``neighbor`` has none."""
        if self.kind == "neighbor":
            return None
        return {"pagerank_walk": "pagerank", "fixed_walk": "fixed_walk"}.get(self.kind, self.kind)

    def label(self) -> str:
        if self.kind == "pagerank_walk":
            return f"pagerank_walk(c={self.c:g})"
        if self.kind == "fixed_walk":
            return f"fixed_walk(M={self.M})"
        if self.kind in SUBGRAPH_SCHEMES:
            return f"{self.kind}(p={self.p:g})"
        return self.kind

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "SchemeSpec":
        unknown = set(d) - {"kind", "c", "M", "p"}
        if unknown:
            raise ParamError(f"unknown scheme keys: {sorted(unknown)}")
        return cls(**d)


def _in_csr(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    child = graph.edge_child
    order = np.argsort(graph.out_parent, kind="stable")
    in_child = child[order]
    in_ptr = np.zeros(graph.n_vertices + 1, dtype=np.int64)
    np.cumsum(graph.in_degree(), out=in_ptr[1:])
    return in_ptr, in_child


def _walk(graph: Graph, start: np.ndarray, steps: np.ndarray) -> np.ndarray:
    par = graph.parent()
    v = start.copy()
    left = steps.copy()
    active = (left > 0) & (par[v] >= 0)
    while np.any(active):
        v[active] = par[v[active]]
        left[active] -= 1
        active &= (left > 0) & (par[v] >= 0)
    return v


def draw_vertices(graph: Graph, scheme: SchemeSpec, size: int, rng=None) -> np.ndarray:
    """``size`` independent draws of a vertex under ``scheme``.

    ``degree`` picks a vertex with probability proportional to its degree;
    ``neighbor`` picks a uniform vertex and then a uniform neighbour, which
    over-weights neighbours of low-degree vertices and has a different limit.
    """
    gen = as_generator(rng)
    n = graph.n_vertices
    if n == 0:
        raise ParamError("cannot sample from an empty graph")
    kind = scheme.kind
    if kind in SUBGRAPH_SCHEMES:
        raise ParamError(f"{kind} is a subgraph scheme, not a node scheme")
    if kind in ("pagerank_walk", "fixed_walk") and not graph.is_tree:
        raise NotTreeCase("walk sampling needs a tree (one out-edge per vertex)")
    start = gen.integers(0, n, size=size)
    if kind == "uniform":
        return start
    if kind == "degree":
        # a uniform degree unit: vertex v is hit with probability deg(v) / sum(deg)
        cum = np.cumsum(graph.degree)
        if cum[-1] == 0:
            return start
        return np.searchsorted(cum, gen.integers(0, cum[-1], size=size), side="right")
    if kind == "neighbor":
        out_deg = graph.out_degree
        in_ptr, in_child = _in_csr(graph)
        in_deg = np.diff(in_ptr)
        cnt = out_deg[start] + in_deg[start]
        j = np.floor(gen.random(size) * cnt).astype(np.int64)
        j = np.minimum(j, np.maximum(cnt - 1, 0))
        res = start.copy()
        is_out = (j < out_deg[start]) & (cnt > 0)
        res[is_out] = graph.out_parent[graph.out_ptr[start[is_out]] + j[is_out]]
        is_in = (~is_out) & (cnt > 0)
        res[is_in] = in_child[in_ptr[start[is_in]] + j[is_in] - out_deg[start[is_in]]]
        return res
    if kind == "in_degree":
        if graph.is_tree:
            par = graph.parent()
            p = par[start]
            return np.where(p >= 0, p, start)
        if graph.n_edges == 0:
            return start
        e = gen.integers(0, graph.n_edges, size=size)
        return graph.out_parent[e]
    if kind == "pagerank_walk":
        steps = gen.geometric(1.0 - scheme.c, size=size) - 1
        return _walk(graph, start, steps)
    return _walk(graph, start, np.full(size, int(scheme.M), dtype=np.int64))


def draw_vertex(graph: Graph, scheme: SchemeSpec, rng=None) -> int:
    return int(draw_vertices(graph, scheme, 1, rng)[0])


@dataclass
class SampleReport:
    scheme: SchemeSpec
    reps: int
    attr_freq: np.ndarray
    stderr: np.ndarray
    theory: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def z(self) -> np.ndarray | None:
        if self.theory is None:
            return None
        se = np.sqrt(self.theory * (1.0 - self.theory) / self.reps)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(se > 0, (self.attr_freq - self.theory) / se, 0.0)

    def to_dict(self) -> dict:
        out = {
            "scheme": self.scheme.to_dict(),
            "label": self.scheme.label(),
            "reps": int(self.reps),
            "attr_freq": self.attr_freq.tolist(),
            "stderr": self.stderr.tolist(),
            "theory": None if self.theory is None else self.theory.tolist(),
        }
        if self.theory is not None:
            out["z"] = self.z.tolist()
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def attribute_representation(graph: Graph, scheme: SchemeSpec, reps: int, rng=None, K: int | None = None,
                             theory: np.ndarray | None = None) -> SampleReport:
    v = draw_vertices(graph, scheme, reps, rng)
    K = K or int(graph.attribute.max()) + 1
    freq = np.bincount(graph.attribute[v], minlength=K) / reps
    stderr = np.sqrt(freq * (1.0 - freq) / reps)
    return SampleReport(scheme, int(reps), freq, stderr, None if theory is None else np.asarray(theory, dtype=float))


# ---------------------------------------------------------------------------
# subgraph sampling


def _relabelled(graph: Graph, keep: np.ndarray, edge_mask: np.ndarray) -> Graph:
    new_id = np.full(graph.n_vertices, -1, dtype=np.int64)
    new_id[keep] = np.arange(len(keep))
    child = new_id[graph.edge_child[edge_mask]]
    parent = new_id[graph.out_parent[edge_mask]]
    # the initialized root keeps its unit degree only while the whole seed survives
    s = graph.seed_size
    seed_kept = s > 0 and len(keep) >= s and np.array_equal(keep[:s], np.arange(s))
    return Graph.from_edges(graph.attribute[keep], np.column_stack([child, parent]), seed_size=s if seed_kept else 0)


def _subset(gen, total: int, p: float, bernoulli: bool) -> np.ndarray:
    if bernoulli:
        return np.nonzero(gen.random(total) < p)[0]
    k = int(math.floor(p * total))
    return np.sort(gen.choice(total, size=k, replace=False))


def induced_subgraph(graph: Graph, p: float, rng=None, bernoulli: bool = False) -> Graph:
    """Keep ``floor(p n)`` uniform vertices (or each w.p. ``p``) and all edges among them."""
    if not 0.0 < p <= 1.0:
        raise ParamError("retention probability must lie in (0, 1]")
    gen = as_generator(rng)
    keep = _subset(gen, graph.n_vertices, p, bernoulli)
    mask = np.zeros(graph.n_vertices, dtype=bool)
    mask[keep] = True
    edge_mask = mask[graph.edge_child] & mask[graph.out_parent]
    return _relabelled(graph, keep, edge_mask)


def incident_subgraph(graph: Graph, p: float, rng=None, bernoulli: bool = False, keep_isolated: bool = False) -> Graph:
    """Keep ``floor(p |E|)`` uniform edges (or each w.p. ``p``) and their endpoints.

    ``keep_isolated=True`` retains every vertex instead, so untouched vertices
    stay in the population with degree zero.
    """
    if not 0.0 < p <= 1.0:
        raise ParamError("retention probability must lie in (0, 1]")
    gen = as_generator(rng)
    chosen = _subset(gen, graph.n_edges, p, bernoulli)
    edge_mask = np.zeros(graph.n_edges, dtype=bool)
    edge_mask[chosen] = True
    if keep_isolated:
        keep = np.arange(graph.n_vertices)
    else:
        ends = np.concatenate([graph.edge_child[edge_mask], graph.out_parent[edge_mask]])
        keep = np.unique(ends)
    return _relabelled(graph, keep, edge_mask)


def minority_top_share(graph: Graph, alpha: float, rule: str = "top_k") -> float:
    """Share of attribute 0 among the highest-degree vertices.

    ``rule="top_k"`` takes the ``ceil(alpha n)`` largest degrees, ties broken
    younger-first.  ``rule="percentile"`` takes every vertex whose degree is at
    least the empirical ``(1 - alpha)`` percentile, keeping whole tie classes.
    """
    if not 0.0 < alpha < 1.0:
        raise ParamError("alpha must lie in (0, 1)")
    n = graph.n_vertices
    if n == 0:
        raise ParamError("empty graph")
    if graph.attribute.max() > 1:
        raise DimensionMismatch("minority_top_share needs a two-attribute graph")
    deg = graph.degree
    if rule == "top_k":
        k = int(math.ceil(alpha * n))
        order = np.lexsort((-np.arange(n), -deg))
        return float(np.mean(graph.attribute[order[:k]] == 0))
    if rule == "percentile":
        cdf = np.cumsum(np.bincount(deg)) / n
        z = int(np.nonzero(cdf >= 1.0 - alpha - 1e-12)[0][0])
        return float(np.mean(graph.attribute[deg >= z] == 0))
    raise ParamError(f"unknown ranking rule {rule!r}")


def empirical_bias(graph: Graph, scheme: SchemeSpec, alpha: float, rng=None, bernoulli: bool = False,
                   rule: str = "top_k", keep_isolated: bool = False) -> float:
    """Top-share of the sampled subgraph minus that of the full graph."""
    if scheme.kind == "induced_nodes":
        sub = induced_subgraph(graph, scheme.p, rng, bernoulli)
    elif scheme.kind == "incident_edges":
        sub = incident_subgraph(graph, scheme.p, rng, bernoulli, keep_isolated=keep_isolated)
    else:
        raise ParamError("empirical bias needs a subgraph scheme")
    return minority_top_share(sub, alpha, rule) - minority_top_share(graph, alpha, rule)
