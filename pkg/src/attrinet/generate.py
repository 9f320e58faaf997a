"""Growth simulators: the attachment classes P and U, and the stopped branching process.

The numba kernels receive all randomness as pre-drawn uniforms from a numpy
``Generator``, so a run is fully determined by ``(master_seed, stream_id)``.
"""

from __future__ import annotations

import heapq
import json
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numba
import numpy as np

from .errors import EmptySeed, ExplosionGuard, MissingNu, NotTreeCase, ParamError
from .model import Graph, ModelParams, RngStream, as_generator, default_seed, validate_params
from .theory.fringe import FringeTree

DEFAULT_EXPLOSION_CAP = 10_000_000


@dataclass
class AttachmentIndex:
    """Per-attribute candidate lists: one entry per degree unit (gamma=1) or per vertex (gamma=0)."""

    items: np.ndarray  # K x capacity
    count: np.ndarray  # K

    @classmethod
    def build(cls, graph: Graph, K: int, gamma: int, capacity: int) -> "AttachmentIndex":
        items = np.zeros((K, max(capacity, 1)), dtype=np.int64)
        count = np.zeros(K, dtype=np.int64)
        for v in range(graph.n_vertices):
            a = int(graph.attribute[v])
            reps = int(graph.degree[v]) if gamma == 1 else 1
            items[a, count[a] : count[a] + reps] = v
            count[a] += reps
        return cls(items, count)

    def totals(self) -> np.ndarray:
        return self.count.copy()


def _draw_attributes(gen: np.random.Generator, pi: np.ndarray, n: int) -> np.ndarray:
    cdf = np.cumsum(pi)
    idx = np.searchsorted(cdf, gen.random(n) * cdf[-1], side="right")
    return np.minimum(idx, len(pi) - 1).astype(np.int64)


@numba.njit(cache=True)
def _grow_p(attr, degree, out_parent, items, count, kappa, m, gamma, n0, e0, u):
    """Append vertices ``n0..len(attr)-1``; edges of one step see the pre-step weights."""
    K = kappa.shape[0]
    N = attr.shape[0]
    e = e0
    ui = 0
    w = np.empty(K)
    for v in range(n0, N):
        a = attr[v]
        total = 0.0
        for b in range(K):
            w[b] = kappa[b, a] * count[b]
            total += w[b]
        mv = m[a]
        for j in range(mv):
            x = u[ui] * total
            ui += 1
            b = 0
            acc = w[0]
            while x >= acc and b < K - 1:
                b += 1
                acc += w[b]
            while count[b] == 0:
                b -= 1
                if b < 0:
                    b = K - 1
            idx = int(u[ui] * count[b])
            ui += 1
            if idx >= count[b]:
                idx = count[b] - 1
            out_parent[e + j] = items[b, idx]
        for j in range(mv):
            t = out_parent[e + j]
            degree[t] += 1
            if gamma == 1:
                bt = attr[t]
                items[bt, count[bt]] = t
                count[bt] += 1
        degree[v] += mv
        if gamma == 1:
            for j in range(mv):
                items[a, count[a]] = v
                count[a] += 1
        else:
            items[a, count[a]] = v
            count[a] += 1
        e += mv


@numba.njit(cache=True)
def _grow_u(attr, degree, out_parent, items, count, kappa, nu, gamma, n0, e0, u):
    """Tree growth where (newcomer attribute, target) is drawn jointly."""
    K = kappa.shape[0]
    N = attr.shape[0]
    e = e0
    wa = np.empty(K)
    wb = np.empty(K)
    for s in range(N - n0):
        v = n0 + s
        total = 0.0
        for a in range(K):
            acc = 0.0
            for b in range(K):
                acc += kappa[b, a] * count[b]
            wa[a] = nu[a] * acc
            total += wa[a]
        x = u[3 * s] * total
        a = 0
        acc = wa[0]
        while x >= acc and a < K - 1:
            a += 1
            acc += wa[a]
        total_b = 0.0
        for b in range(K):
            wb[b] = kappa[b, a] * count[b]
            total_b += wb[b]
        x = u[3 * s + 1] * total_b
        b = 0
        acc = wb[0]
        while x >= acc and b < K - 1:
            b += 1
            acc += wb[b]
        while count[b] == 0:
            b -= 1
            if b < 0:
                b = K - 1
        idx = int(u[3 * s + 2] * count[b])
        if idx >= count[b]:
            idx = count[b] - 1
        t = items[b, idx]
        attr[v] = a
        out_parent[e] = t
        degree[t] += 1
        degree[v] += 1
        if gamma == 1:
            bt = attr[t]
            items[bt, count[bt]] = t
            count[bt] += 1
            items[a, count[a]] = v
            count[a] += 1
        else:
            items[a, count[a]] = v
            count[a] += 1
        e += 1


def _prepare(params: ModelParams, seed_graph: Graph | None, seed_attrs) -> Graph:
    g = seed_graph if seed_graph is not None else default_seed(params, seed_attrs)
    if g.n_vertices == 0:
        raise EmptySeed("seed graph has no vertices")
    if np.any(g.attribute < 0) or np.any(g.attribute >= params.K):
        raise ParamError("seed attribute out of range")
    if params.gamma == 1 and g.degree.sum() <= 0:
        raise EmptySeed("seed graph has zero total attachment weight")
    return g


def _assemble(seed: Graph, attr, degree, out_parent, m_new) -> Graph:
    n0 = seed.n_vertices
    out_deg = np.concatenate([seed.out_degree, m_new])
    out_ptr = np.zeros(len(attr) + 1, dtype=np.int64)
    np.cumsum(out_deg, out=out_ptr[1:])
    return Graph(attr, degree, out_ptr, out_parent, seed.seed_size if n0 else 1)


def generate_P(
    params: ModelParams,
    n: int,
    seed_graph: Graph | None = None,
    rng=None,
    seed_attrs: Sequence[int] | int | None = None,
) -> Graph:
    """Append ``n`` vertices: attribute ~ pi, each of ``m_a`` edges picks ``v`` w.p. ~ kappa(a(v), a) deg(v)^gamma."""
    params = validate_params(params)
    gen = as_generator(rng)
    seed = _prepare(params, seed_graph, seed_attrs)
    n = int(n)
    if n < 0:
        raise ParamError("n must be non-negative")
    n0 = seed.n_vertices
    new_attr = _draw_attributes(gen, params.pi, n)
    m_new = params.m[new_attr].astype(np.int64)
    E_new = int(m_new.sum())
    u = gen.random(2 * E_new)
    attr = np.concatenate([seed.attribute.astype(np.int64), new_attr])
    degree = np.concatenate([seed.degree.astype(np.int64), np.zeros(n, dtype=np.int64)])
    out_parent = np.concatenate([seed.out_parent.astype(np.int64), np.zeros(E_new, dtype=np.int64)])
    cap = int(seed.degree.sum()) + 2 * E_new if params.gamma == 1 else n0 + n
    idx = AttachmentIndex.build(seed, params.K, params.gamma, cap)
    _grow_p(attr, degree, out_parent, idx.items, idx.count, params.kappa, params.m.astype(np.int64),
            int(params.gamma), n0, seed.n_edges, u)
    return _assemble(seed, attr, degree, out_parent, m_new)


def generate_U(
    params: ModelParams,
    n: int,
    seed_graph: Graph | None = None,
    rng=None,
    seed_attrs: int | None = None,
) -> Graph:
    """Tree growth drawing (attribute, target) jointly w.p. ~ nu(a) kappa(a(v), a) deg(v)^gamma."""
    params = validate_params(params)
    if params.nu is None:
        raise MissingNu("model U needs a weight vector nu")
    if not params.is_tree:
        raise NotTreeCase("model U is defined with all out-degrees equal to one")
    gen = as_generator(rng)
    seed = _prepare(params, seed_graph, seed_attrs)
    n = int(n)
    if n < 0:
        raise ParamError("n must be non-negative")
    n0 = seed.n_vertices
    nu = params.nu / params.nu.sum()
    u = gen.random(3 * n)
    attr = np.concatenate([seed.attribute.astype(np.int64), np.zeros(n, dtype=np.int64)])
    degree = np.concatenate([seed.degree.astype(np.int64), np.zeros(n, dtype=np.int64)])
    out_parent = np.concatenate([seed.out_parent.astype(np.int64), np.zeros(n, dtype=np.int64)])
    cap = int(seed.degree.sum()) + 2 * n if params.gamma == 1 else n0 + n
    idx = AttachmentIndex.build(seed, params.K, params.gamma, cap)
    _grow_u(attr, degree, out_parent, idx.items, idx.count, params.kappa, nu, int(params.gamma), n0, seed.n_edges, u)
    return _assemble(seed, attr, degree, out_parent, np.ones(n, dtype=np.int64))


# ---------------------------------------------------------------------------
# stopped branching process


@dataclass
class LocalLimitTree:
    """Progeny of the stopped process; vertex 0 is the root, parents precede children."""

    attribute: np.ndarray
    parent: np.ndarray
    birth_time: np.ndarray
    tau: float
    m: np.ndarray = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return len(self.attribute)

    def children_count(self) -> np.ndarray:
        return np.bincount(self.parent[1:], minlength=self.size) if self.size > 1 else np.zeros(1, dtype=np.int64)

    @property
    def root_degree(self) -> int:
        return int(self.children_count()[0] + (self.m[self.attribute[0]] if self.m is not None else 1))

    def to_fringe(self) -> FringeTree:
        kids: list[list[int]] = [[] for _ in range(self.size)]
        for v in range(1, self.size):
            kids[self.parent[v]].append(v)

        def build(v: int) -> FringeTree:
            return FringeTree(int(self.attribute[v]), tuple(build(c) for c in kids[v]))

        return build(0)


def simulate_local_limit(
    params: ModelParams,
    sol,
    root_attr: int | None = None,
    rng=None,
    cap: int = DEFAULT_EXPLOSION_CAP,
) -> LocalLimitTree:
    """Run the multi-type pure-birth process until an independent ``Exp(2)`` time.

    A type-``a`` vertex with ``xi`` children gives birth at rate
    ``phi_a (xi + m_a)``; the child is type ``b`` w.p. ``phi_ab / phi_a``.
    """
    params = validate_params(params)
    if params.gamma != 1:
        raise ParamError("the branching-process limit is defined for gamma = 1")
    gen = as_generator(rng)
    phi_ab = np.asarray(sol.phi_ab, dtype=float)
    phi_a = phi_ab.sum(axis=1)
    cdf = np.cumsum(phi_ab, axis=1) / phi_a[:, None]
    m = params.m
    if root_attr is None:
        root_attr = int(_draw_attributes(gen, params.pi, 1)[0])
    tau = float(gen.exponential(0.5))
    attr = [int(root_attr)]
    parent = [-1]
    birth = [0.0]
    xi = [0]
    heap = [(gen.exponential(1.0 / (phi_a[root_attr] * m[root_attr])), 0)]
    while heap:
        t, v = heapq.heappop(heap)
        if t > tau:
            break
        a = attr[v]
        b = int(np.searchsorted(cdf[a], gen.random() * cdf[a, -1], side="right"))
        b = min(b, params.K - 1)
        c = len(attr)
        attr.append(b)
        parent.append(v)
        birth.append(t)
        xi.append(0)
        xi[v] += 1
        if len(attr) > cap:
            raise ExplosionGuard(f"branching process exceeded {cap} individuals")
        heapq.heappush(heap, (t + gen.exponential(1.0 / (phi_a[a] * (xi[v] + m[a]))), v))
        heapq.heappush(heap, (t + gen.exponential(1.0 / (phi_a[b] * m[b])), c))
    return LocalLimitTree(np.array(attr, dtype=np.int64), np.array(parent, dtype=np.int64),
                          np.array(birth), tau, params.m.copy())


# ---------------------------------------------------------------------------
# run manifest


def run_manifest(params: ModelParams, seed: int | RngStream | None, n: int, wall_time: float, **extra) -> dict:
    if isinstance(seed, RngStream):
        seed_info = {"master_seed": seed.master_seed, "stream_id": list(np.atleast_1d(seed.stream_id).tolist())}
    else:
        seed_info = {"master_seed": seed}
    out = {
        "params": params.to_dict(),
        "param_hash": params.param_hash(),
        "seed": seed_info,
        "n": int(n),
        "wall_time_s": float(wall_time),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "python": platform.python_version(),
    }
    out.update(extra)
    return out


def write_manifest(path: str | Path, manifest: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
