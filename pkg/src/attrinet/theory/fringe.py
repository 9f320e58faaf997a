"""Small attributed rooted trees and their limiting fringe probabilities.

A :class:`FringeTree` keeps children in birth order (oldest first).  Two trees
belong to the same isomorphism class iff their :meth:`FringeTree.canonical`
strings agree; the string sorts child encodings so order is forgotten.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import NotTreeCase, ParamError, TooLarge

DEFAULT_CAP = 6


@dataclass(frozen=True)
class FringeTree:
    attr: int
    children: tuple["FringeTree", ...] = ()

    @property
    def size(self) -> int:
        return 1 + sum(ch.size for ch in self.children)

    @property
    def degree(self) -> int:
        """Degree inside the fringe, counting the edge towards the parent (root included)."""
        return len(self.children) + 1

    def canonical(self) -> str:
        return canonical_string(self.attr, [ch.canonical() for ch in self.children])

    def vertices(self):
        """Pre-order traversal yielding ``(attr, degree)`` pairs."""
        yield self.attr, self.degree
        for ch in self.children:
            yield from ch.vertices()

    def weight(self, phi_a: np.ndarray) -> float:
        return float(sum(phi_a[a] * d for a, d in self.vertices()))

    def ordered_variants(self) -> list["FringeTree"]:
        """Every distinct birth-ordered tree in this tree's isomorphism class."""
        per_child = [ch.ordered_variants() for ch in self.children]
        seen: dict[tuple, FringeTree] = {}
        for perm in _distinct_permutations(range(len(self.children)), [c.canonical() for c in self.children]):
            for combo in itertools.product(*(per_child[i] for i in perm)):
                t = FringeTree(self.attr, tuple(combo))
                seen.setdefault(_key(t), t)
        return list(seen.values())

    @classmethod
    def from_canonical(cls, s: str) -> "FringeTree":
        t, pos = _parse(s, 0)
        if pos != len(s):
            raise ParamError(f"trailing characters in fringe encoding {s!r}")
        return t

    def __str__(self) -> str:
        return self.canonical()


def canonical_string(attr: int, child_codes) -> str:
    return f"{attr}(" + "".join(sorted(child_codes)) + ")"


def _key(t: FringeTree) -> tuple:
    return (t.attr, tuple(_key(c) for c in t.children))


def _distinct_permutations(idx, labels):
    seen = set()
    for perm in itertools.permutations(idx):
        lab = tuple(labels[i] for i in perm)
        if lab not in seen:
            seen.add(lab)
            yield perm


def _parse(s: str, pos: int):
    j = pos
    while j < len(s) and s[j].isdigit():
        j += 1
    if j == pos or j >= len(s) or s[j] != "(":
        raise ParamError(f"bad fringe encoding at offset {pos} in {s!r}")
    attr = int(s[pos:j])
    j += 1
    kids = []
    while j < len(s) and s[j] != ")":
        ch, j = _parse(s, j)
        kids.append(ch)
    if j >= len(s):
        raise ParamError(f"unterminated fringe encoding {s!r}")
    return FringeTree(attr, tuple(kids)), j + 1


def all_ordered_trees(size: int, K: int) -> list[FringeTree]:
    """Every birth-ordered attributed tree with ``size`` vertices."""
    return list(_ordered(size, K))


@lru_cache(maxsize=None)
def _ordered(size: int, K: int) -> tuple[FringeTree, ...]:
    out = []
    for a in range(K):
        for forest in _forests(size - 1, K):
            out.append(FringeTree(a, forest))
    return tuple(out)


@lru_cache(maxsize=None)
def _forests(total: int, K: int) -> tuple[tuple[FringeTree, ...], ...]:
    if total == 0:
        return ((),)
    out = []
    for first in range(1, total + 1):
        for t in _ordered(first, K):
            for rest in _forests(total - first, K):
                out.append((t,) + rest)
    return tuple(out)


def all_classes(size: int, K: int) -> list[FringeTree]:
    """One representative per isomorphism class of attributed trees of ``size`` vertices."""
    reps: dict[str, FringeTree] = {}
    for t in _ordered(size, K):
        reps.setdefault(t.canonical(), t)
    return list(reps.values())


# ---------------------------------------------------------------------------
# probabilities of a birth-ordered tree


class _Flat:
    """Array view of an ordered tree: parent pointers and sibling precedence."""

    def __init__(self, t: FringeTree):
        self.attr: list[int] = []
        self.parent: list[int] = []
        self.prev_sib: list[int] = []
        self._walk(t, -1)

    def _walk(self, t: FringeTree, parent: int) -> int:
        v = len(self.attr)
        self.attr.append(t.attr)
        self.parent.append(parent)
        self.prev_sib.append(-1)
        prev = -1
        for ch in t.children:
            u = self._walk(ch, v)
            self.prev_sib[u] = prev
            prev = u
        return v


def ordered_probability_enumeration(t: FringeTree, phi_ab: np.ndarray, phi_a: np.ndarray, pi: np.ndarray) -> float:
    """Sum over every historical ordering of the product of attachment weights."""
    f = _Flat(t)
    n = len(f.attr)
    total_w = t.weight(phi_a)
    prefactor = 2.0 * pi[t.attr] / (2.0 + total_w)
    if n == 1:
        return float(prefactor)
    deg = [0] * n
    deg[0] = 1
    present = [False] * n
    present[0] = True

    def rec(k: int, w_cur: float) -> float:
        if k == n:
            return 1.0
        acc = 0.0
        for v in range(1, n):
            if present[v]:
                continue
            p = f.parent[v]
            s = f.prev_sib[v]
            if not present[p] or (s >= 0 and not present[s]):
                continue
            factor = deg[p] * phi_ab[f.attr[p], f.attr[v]] / (2.0 + w_cur)
            present[v] = True
            deg[p] += 1
            deg[v] = 1
            acc += factor * rec(k + 1, w_cur + phi_a[f.attr[p]] + phi_a[f.attr[v]])
            present[v] = False
            deg[p] -= 1
            deg[v] = 0
        return acc

    return float(prefactor * rec(1, float(phi_a[t.attr])))


def ordered_probability_recursion(t: FringeTree, phi_ab: np.ndarray, phi_a: np.ndarray, pi: np.ndarray) -> float:
    """Peel the youngest leaf-child of each vertex and recurse."""
    phi_ab = np.asarray(phi_ab, dtype=float)
    phi_a = np.asarray(phi_a, dtype=float)
    pi = np.asarray(pi, dtype=float)
    memo: dict[tuple, float] = {}

    def rec(tt: FringeTree) -> float:
        key = _key(tt)
        if key in memo:
            return memo[key]
        if not tt.children:
            val = 2.0 * pi[tt.attr] / (2.0 + phi_a[tt.attr])
        else:
            num = 0.0
            for reduced, parent_attr, parent_deg, child_attr in _peelings(tt):
                num += rec(reduced) * (parent_deg - 1) * phi_ab[parent_attr, child_attr]
            val = num / (2.0 + tt.weight(phi_a))
        memo[key] = val
        return val

    return float(rec(t))


def _peelings(t: FringeTree):
    """Yield ``(t minus y_v, attr(v), deg(v, t), attr(y_v))`` for each ``v`` whose youngest child is a leaf."""
    if t.children:
        y = t.children[-1]
        if not y.children:
            yield FringeTree(t.attr, t.children[:-1]), t.attr, t.degree, y.attr
    for i, ch in enumerate(t.children):
        for reduced, pa, pd, ca in _peelings(ch):
            yield FringeTree(t.attr, t.children[:i] + (reduced,) + t.children[i + 1 :]), pa, pd, ca


def fringe_probability(
    t: FringeTree | str,
    sol,
    params,
    cap: int = DEFAULT_CAP,
    method: str = "enumeration",
    ordered: bool = False,
) -> float:
    """Limiting probability that a uniform vertex's fringe is ``t``.

    By default ``t`` names an isomorphism class and the value sums over its
    distinct birth-ordered representatives; ``ordered=True`` scores ``t``
    exactly as given.
    """
    if isinstance(t, str):
        t = FringeTree.from_canonical(t)
    if not params.is_tree:
        raise NotTreeCase("fringe probabilities are defined for trees only")
    if params.gamma != 1:
        raise ParamError("fringe probabilities require gamma = 1")
    if t.size > cap:
        raise TooLarge(f"fringe of size {t.size} exceeds cap {cap}")
    if any(a < 0 or a >= params.K for a, _ in t.vertices()):
        raise ParamError("fringe attribute out of range")
    fn = {"enumeration": ordered_probability_enumeration, "recursion": ordered_probability_recursion}[method]
    reps = [t] if ordered else t.ordered_variants()
    return float(sum(fn(r, sol.phi_ab, sol.phi_a, params.pi) for r in reps))
