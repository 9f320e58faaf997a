"""Model parameters, the append-only attributed graph, RNG streams and CSV I/O."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BadGamma, DimensionMismatch, MalformedInput, ParamError, ZeroEntry

PI_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Parameter bundle for the growth models.

    ``kappa[a, b]`` is the propensity of an existing type-``a`` vertex for a
    type-``b`` newcomer.  ``m`` holds per-type out-degrees (all ones = trees).
    ``nu`` is only used by the weighted-choice model.
    """

    pi: np.ndarray
    kappa: np.ndarray
    m: np.ndarray = None  # type: ignore[assignment]
    gamma: int = 1
    nu: np.ndarray | None = None

    def __post_init__(self):
        pi = np.atleast_1d(np.asarray(self.pi, dtype=float))
        kappa = np.atleast_2d(np.asarray(self.kappa, dtype=float))
        m = np.ones(len(pi), dtype=np.int64) if self.m is None else np.atleast_1d(np.asarray(self.m))
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "m", m)
        if self.nu is not None:
            object.__setattr__(self, "nu", np.atleast_1d(np.asarray(self.nu, dtype=float)))

    @property
    def K(self) -> int:
        return len(self.pi)

    @property
    def is_tree(self) -> bool:
        return bool(np.all(self.m == 1))

    def with_(self, **changes) -> "ModelParams":
        d = dict(pi=self.pi, kappa=self.kappa, m=self.m, gamma=self.gamma, nu=self.nu)
        d.update(changes)
        return ModelParams(**d)

    def to_dict(self) -> dict:
        d = {
            "K": self.K,
            "pi": [float(x) for x in self.pi],
            "kappa": [[float(x) for x in row] for row in self.kappa],
            "m": [int(x) for x in self.m],
            "gamma": int(self.gamma),
        }
        if self.nu is not None:
            d["nu"] = [float(x) for x in self.nu]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        known = {"K", "pi", "kappa", "m", "gamma", "nu"}
        unknown = set(d) - known
        if unknown:
            raise ParamError(f"unknown parameter keys: {sorted(unknown)}")
        p = cls(pi=d["pi"], kappa=d["kappa"], m=d.get("m"), gamma=d.get("gamma", 1), nu=d.get("nu"))
        if "K" in d and int(d["K"]) != p.K:
            raise DimensionMismatch(f"K={d['K']} but pi has length {p.K}")
        return p

    def param_hash(self) -> str:
        """Stable digest of the parameters (``repr`` of floats round-trips exactly)."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def validate_params(params: ModelParams) -> ModelParams:
    """Check the model invariants; renormalize ``pi`` when it is off by at most 1e-12."""
    pi, kappa, m = params.pi, params.kappa, params.m
    K = len(pi)
    if K < 1 or pi.ndim != 1:
        raise DimensionMismatch("pi must be a non-empty vector")
    if kappa.shape != (K, K):
        raise DimensionMismatch(f"kappa has shape {kappa.shape}, expected {(K, K)}")
    if m.shape != (K,):
        raise DimensionMismatch(f"m has shape {m.shape}, expected {(K,)}")
    if params.nu is not None and params.nu.shape != (K,):
        raise DimensionMismatch(f"nu has shape {params.nu.shape}, expected {(K,)}")
    if params.gamma not in (0, 1):
        raise BadGamma(f"gamma must be 0 or 1, got {params.gamma!r}")
    if not np.all(np.isfinite(pi)) or np.any(pi <= 0):
        raise ZeroEntry("every entry of pi must be strictly positive")
    if not np.all(np.isfinite(kappa)) or np.any(kappa <= 0):
        raise ZeroEntry("every entry of kappa must be strictly positive")
    if params.nu is not None and (not np.all(np.isfinite(params.nu)) or np.any(params.nu <= 0)):
        raise ZeroEntry("every entry of nu must be strictly positive")
    if np.any(m != np.round(m)) or np.any(m < 1):
        raise ParamError("out-degrees m must be integers >= 1")
    s = pi.sum()
    if abs(s - 1.0) > PI_TOL:
        raise ParamError(f"pi sums to {s!r}, not 1")
    if s != 1.0:
        params = params.with_(pi=pi / s)
    if m.dtype.kind != "i":
        params = params.with_(m=m.astype(np.int64))
    return params


@dataclass(frozen=True)
class RngStream:
    """Deterministic sub-stream of a 64-bit master seed (Philox counter-based generator)."""

    master_seed: int
    stream_id: int | tuple[int, ...] = 0

    def generator(self) -> np.random.Generator:
        key = self.stream_id if isinstance(self.stream_id, tuple) else (self.stream_id,)
        ss = np.random.SeedSequence(self.master_seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, i: int) -> "RngStream":
        key = self.stream_id if isinstance(self.stream_id, tuple) else (self.stream_id,)
        return RngStream(self.master_seed, key + (i,))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an RngStream, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


@dataclass(eq=False)
class Graph:
    """Append-only attributed multigraph with child -> parent edges.

    Vertex ids are dense and equal to birth order.  The out-edges of ``v`` are
    ``out_parent[out_ptr[v]:out_ptr[v + 1]]``.  A singleton seed is initialized
    with degree one, so its stored degree exceeds its edge count by one.
    """

    attribute: np.ndarray
    degree: np.ndarray
    out_ptr: np.ndarray
    out_parent: np.ndarray
    seed_size: int = 1
    _parent_cache: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.attribute)

    @property
    def n_edges(self) -> int:
        return len(self.out_parent)

    @property
    def birth_index(self) -> np.ndarray:
        return np.arange(self.n_vertices, dtype=np.int64)

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    @property
    def edge_child(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_vertices, dtype=np.int64), self.out_degree)

    def out_edges(self, v: int) -> np.ndarray:
        return self.out_parent[self.out_ptr[v] : self.out_ptr[v + 1]]

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.out_parent, minlength=self.n_vertices).astype(np.int64)

    @property
    def degree_bonus(self) -> np.ndarray:
        """Degree units not backed by an edge (the initialized singleton root)."""
        bonus = np.zeros(self.n_vertices, dtype=np.int64)
        if self.seed_size == 1 and self.n_vertices:
            bonus[0] = 1
        return bonus

    def recomputed_degree(self) -> np.ndarray:
        return self.out_degree + self.in_degree() + self.degree_bonus

    @property
    def is_tree(self) -> bool:
        """Singleton seed and exactly one out-edge per non-root vertex."""
        od = self.out_degree
        return self.seed_size == 1 and (self.n_vertices == 0 or (od[0] == 0 and np.all(od[1:] == 1)))

    def parent(self) -> np.ndarray:
        """Parent array of a tree (root maps to -1)."""
        if not self.is_tree:
            from .errors import NotTreeCase

            raise NotTreeCase("parent pointers are only defined for trees")
        if self._parent_cache is None:
            par = np.full(self.n_vertices, -1, dtype=np.int64)
            par[1:] = self.out_parent
            self._parent_cache = par
        return self._parent_cache

    def check(self) -> None:
        """Full scan of the birth-ordered DAG and degree bookkeeping invariants."""
        n = self.n_vertices
        if self.out_ptr.shape != (n + 1,) or self.out_ptr[0] != 0 or self.out_ptr[-1] != len(self.out_parent):
            raise MalformedInput("inconsistent out-edge offsets")
        if np.any(np.diff(self.out_ptr) < 0):
            raise MalformedInput("negative out-degree")
        child = self.edge_child
        if len(child) and (np.any(self.out_parent < 0) or np.any(self.out_parent >= child)):
            raise MalformedInput("edge to a nonexistent or younger vertex")
        if not np.array_equal(self.recomputed_degree(), self.degree):
            raise MalformedInput("stored degrees disagree with the edge lists")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.seed_size == other.seed_size
            and np.array_equal(self.attribute, other.attribute)
            and np.array_equal(self.degree, other.degree)
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_parent, other.out_parent)
        )

    @classmethod
    def from_edges(
        cls,
        attribute: Sequence[int],
        edges: Sequence[tuple[int, int]],
        seed_size: int = 1,
    ) -> "Graph":
        """Build a graph from (child, parent) pairs; degrees are derived from the edges."""
        attribute = np.asarray(attribute, dtype=np.int64)
        n = len(attribute)
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        order = np.argsort(e[:, 0], kind="stable")
        e = e[order]
        if len(e) and (e[:, 0].min() < 0 or e[:, 0].max() >= n):
            raise MalformedInput("edge from a nonexistent vertex")
        counts = np.bincount(e[:, 0], minlength=n) if n else np.zeros(0, dtype=np.int64)
        out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=out_ptr[1:])
        g = cls(attribute, np.zeros(n, dtype=np.int64), out_ptr, e[:, 1].copy(), seed_size)
        if len(e) and (np.any(e[:, 1] < 0) or np.any(e[:, 1] >= e[:, 0])):
            raise MalformedInput("edge to a nonexistent or younger vertex")
        g.degree = g.recomputed_degree()
        return g

    @classmethod
    def singleton(cls, attribute: int = 0) -> "Graph":
        return cls.from_edges([attribute], [], seed_size=1)

    @classmethod
    def star(cls, attributes: Sequence[int]) -> "Graph":
        """Star seed: vertex 0 is the hub, every other seed vertex points to it."""
        s = len(attributes)
        return cls.from_edges(attributes, [(i, 0) for i in range(1, s)], seed_size=s)


def default_seed(params: ModelParams, attributes: Sequence[int] | int | None = None) -> Graph:
    """Singleton for trees, otherwise a star on ``max(m) + 1`` vertices."""
    if params.is_tree:
        a = 0 if attributes is None else (attributes if isinstance(attributes, (int, np.integer)) else attributes[0])
        return Graph.singleton(int(a))
    size = int(params.m.max()) + 1
    if attributes is None:
        attributes = [0] * size
    elif isinstance(attributes, (int, np.integer)):
        attributes = [int(attributes)] * size
    if len(attributes) != size:
        raise DimensionMismatch(f"star seed needs {size} attributes, got {len(attributes)}")
    return Graph.star(attributes)


# ---------------------------------------------------------------------------
# CSV serialization

VERTEX_HEADER = "id,attribute,birth_index,degree"
EDGE_HEADER = "child_id,parent_id"


def _rows_to_bytes(header: str, cols: list[np.ndarray]) -> bytes:
    buf = io.StringIO()
    buf.write(header + "\n")
    if len(cols[0]):
        np.savetxt(buf, np.column_stack(cols), fmt="%d", delimiter=",", newline="\n")
    return buf.getvalue().encode("utf-8")


def serialize_graph(graph: Graph) -> tuple[bytes, bytes]:
    """Return the ``(vertices.csv, edges.csv)`` byte contents."""
    n = graph.n_vertices
    ids = np.arange(n, dtype=np.int64)
    vertices = _rows_to_bytes(VERTEX_HEADER, [ids, graph.attribute, ids, graph.degree])
    edges = _rows_to_bytes(EDGE_HEADER, [graph.edge_child, graph.out_parent])
    return vertices, edges


def _read_int_table(data: bytes, header: str) -> np.ndarray:
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise MalformedInput("empty CSV") from None
    if ",".join(h.strip() for h in first) != header:
        raise MalformedInput(f"expected header {header!r}, got {','.join(first)!r}")
    width = header.count(",") + 1
    rows = [r for r in reader if r]
    try:
        arr = np.array(rows, dtype=np.int64)
    except ValueError as exc:
        raise MalformedInput(f"non-integer field: {exc}") from None
    return arr.reshape(-1, width)


def deserialize_graph(vertices: bytes, edges: bytes, seed_size: int | None = None) -> Graph:
    """Inverse of :func:`serialize_graph`.

    The CSV pair does not record the seed size.  When ``seed_size`` is omitted it
    is inferred as 1 if vertex 0 carries the initialized extra degree unit;
    multi-vertex seeds must be passed explicitly (the run manifest records it).
    """
    vt = _read_int_table(vertices, VERTEX_HEADER)
    et = _read_int_table(edges, EDGE_HEADER)
    n = len(vt)
    if n and not np.array_equal(vt[:, 0], np.arange(n)):
        raise MalformedInput("vertex ids must be dense and sorted")
    if n and not np.array_equal(vt[:, 2], vt[:, 0]):
        raise MalformedInput("birth_index must equal id")
    if len(et) and (et[:, 0].min() < 0 or et[:, 0].max() >= n or et[:, 1].min() < 0 or et[:, 1].max() >= n):
        raise MalformedInput("edge references a nonexistent vertex")
    if len(et) and np.any(et[:, 1] >= et[:, 0]):
        raise MalformedInput("edge points to a younger vertex")
    if len(et) and np.any(np.diff(et[:, 0]) < 0):
        raise MalformedInput("edge rows must be grouped by child in birth order")
    g = Graph.from_edges(vt[:, 1], et, seed_size=1)
    edge_degree = g.out_degree + g.in_degree()
    stored = vt[:, 3].astype(np.int64)
    if seed_size is None:
        bonus = stored - edge_degree
        if n and bonus[0] == 1 and np.all(bonus[1:] == 0):
            seed_size = 1
        elif n and np.all(bonus == 0):
            raise MalformedInput("seed size cannot be inferred for a multi-vertex seed; pass seed_size")
        else:
            raise MalformedInput("stored degrees disagree with the edge table")
    g.seed_size = int(seed_size)
    g.degree = stored
    g.check()
    return g


def write_graph(graph: Graph, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    vb, eb = serialize_graph(graph)
    vp, ep = directory / "vertices.csv", directory / "edges.csv"
    vp.write_bytes(vb)
    ep.write_bytes(eb)
    return vp, ep


def read_graph(directory: str | Path, seed_size: int | None = None) -> Graph:
    directory = Path(directory)
    return deserialize_graph((directory / "vertices.csv").read_bytes(), (directory / "edges.csv").read_bytes(), seed_size)
