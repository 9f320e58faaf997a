from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from attrinet.centrality import pagerank_exact
from attrinet.errors import DimensionMismatch, NotTreeCase, ParamError
from attrinet.generate import generate_P
from attrinet.model import Graph, ModelParams, RngStream
from attrinet.sample import (
    SchemeSpec,
    attribute_representation,
    draw_vertex,
    draw_vertices,
    empirical_bias,
    incident_subgraph,
    induced_subgraph,
    minority_top_share,
)


def _chisq_p(counts: np.ndarray, probs: np.ndarray) -> float:
    keep = probs > 0
    assert counts[~keep].sum() == 0
    return float(sps.chisquare(counts[keep], probs[keep] * counts.sum()).pvalue)


@pytest.fixture
def tree200(asym):
    return generate_P(asym, 199, rng=np.random.default_rng(5))


def test_scheme_validation():
    with pytest.raises(ParamError):
        SchemeSpec("pagerank_walk")
    with pytest.raises(ParamError):
        SchemeSpec("fixed_walk", M=-1)
    with pytest.raises(ParamError):
        SchemeSpec("induced_nodes", p=0.0)
    with pytest.raises(ParamError):
        SchemeSpec("bogus")
    with pytest.raises(ParamError):
        SchemeSpec.from_dict({"kind": "uniform", "q": 1})
    s = SchemeSpec("pagerank_walk", c=0.85)
    assert SchemeSpec.from_dict(s.to_dict()) == s
    assert s.label() == "pagerank_walk(c=0.85)" and s.theory_key == "pagerank"


def test_single_vertex_every_scheme():
    g = Graph.singleton(1)
    for s in (SchemeSpec("uniform"), SchemeSpec("degree"), SchemeSpec("neighbor"), SchemeSpec("in_degree"),
              SchemeSpec("pagerank_walk", c=0.5), SchemeSpec("fixed_walk", M=3)):
        assert draw_vertex(g, s, rng=1) == 0


def test_zero_length_walk_is_uniform(tree200):
    a = draw_vertices(tree200, SchemeSpec("fixed_walk", M=0), 1000, rng=np.random.default_rng(3))
    b = draw_vertices(tree200, SchemeSpec("uniform"), 1000, rng=np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_in_degree_returns_parent_or_root(tree200):
    starts = np.random.default_rng(9).integers(0, 200, 500)
    got = draw_vertices(tree200, SchemeSpec("in_degree"), 500, rng=np.random.default_rng(9))
    par = tree200.parent()
    assert np.array_equal(got, np.where(starts == 0, 0, par[starts]))


def test_pagerank_walk_matches_scores(tree200):
    c = 0.6
    reps = 1_000_000
    v = draw_vertices(tree200, SchemeSpec("pagerank_walk", c=c), reps, rng=np.random.default_rng(11))
    fr = pagerank_exact(tree200, c).fr
    probs = fr.copy()
    # walks that reach the root stop there, so it collects the absorbed mass
    probs[0] = 1 - fr[1:].sum()
    assert probs[0] == pytest.approx(fr[0] / (1 - c), abs=1e-12)
    assert _chisq_p(np.bincount(v, minlength=200), probs) > 1e-3


def test_fixed_walk_lands_on_ancestor(tree200):
    M = 3
    reps = 400_000
    v = draw_vertices(tree200, SchemeSpec("fixed_walk", M=M), reps, rng=np.random.default_rng(12))
    par = tree200.parent()
    probs = np.zeros(200)
    for u in range(200):
        w = u
        for _ in range(M):
            if par[w] < 0:
                break
            w = par[w]
        probs[w] += 1 / 200
    assert _chisq_p(np.bincount(v, minlength=200), probs) > 1e-3


def test_degree_scheme_is_degree_proportional(asym):
    g = generate_P(asym, 60, rng=np.random.default_rng(3))
    v = draw_vertices(g, SchemeSpec("degree"), 500_000, rng=np.random.default_rng(15))
    assert _chisq_p(np.bincount(v, minlength=g.n_vertices), g.degree / g.degree.sum()) > 1e-3


def test_neighbor_scheme_is_uniform_neighbour():
    params = ModelParams(pi=[0.5, 0.5], kappa=[[1.0, 1.0], [1.0, 1.0]], m=[1, 2])
    g = generate_P(params, 40, rng=np.random.default_rng(2))
    n = g.n_vertices
    nbrs = [[] for _ in range(n)]
    for ch, pa in zip(g.edge_child, g.out_parent):
        nbrs[ch].append(pa)
        nbrs[pa].append(ch)
    probs = np.zeros(n)
    for u in range(n):
        if nbrs[u]:
            for w in nbrs[u]:
                probs[w] += 1 / (n * len(nbrs[u]))
        else:
            probs[u] += 1 / n
    v = draw_vertices(g, SchemeSpec("neighbor"), 500_000, rng=np.random.default_rng(13))
    assert _chisq_p(np.bincount(v, minlength=n), probs) > 1e-3


def test_walks_need_trees():
    params = ModelParams(pi=[1.0], kappa=[[1.0]], m=[2])
    g = generate_P(params, 20, rng=1)
    with pytest.raises(NotTreeCase):
        draw_vertices(g, SchemeSpec("pagerank_walk", c=0.5), 10)
    assert draw_vertices(g, SchemeSpec("in_degree"), 10, rng=1).shape == (10,)


def test_representation_report(asym, tree200):
    rep = attribute_representation(tree200, SchemeSpec("uniform"), 10_000, rng=1, K=2, theory=asym.pi)
    assert rep.attr_freq.sum() == pytest.approx(1.0)
    assert rep.stderr == pytest.approx(np.sqrt(rep.attr_freq * (1 - rep.attr_freq) / 10_000))
    d = rep.to_dict()
    assert d["label"] == "uniform" and len(d["z"]) == 2


# -- subgraphs -------------------------------------------------------------------------


def _labelled_graph() -> Graph:
    # attributes equal vertex ids so the kept set can be read off the subgraph
    edges = [(1, 0), (2, 0), (3, 1), (4, 1), (4, 2), (5, 3)]
    return Graph.from_edges(np.arange(6), edges, seed_size=1)


def test_induced_brute_force():
    g = _labelled_graph()
    edges = {(int(c), int(p)) for c, p in zip(g.edge_child, g.out_parent)}
    k = 3
    subsets = list(itertools.combinations(range(6), k))
    counts = Counter()
    gen = np.random.default_rng(14)
    for _ in range(20_000):
        sub = induced_subgraph(g, 0.5, gen)
        kept = tuple(sub.attribute.tolist())
        got = {(kept[c], kept[p]) for c, p in zip(sub.edge_child, sub.out_parent)}
        assert got == {(c, p) for c, p in edges if c in kept and p in kept}
        counts[kept] += 1
    assert set(counts) <= set(subsets)
    obs = np.array([counts[s] for s in subsets], dtype=float)
    assert sps.chisquare(obs).pvalue > 1e-3


def test_incident_keeps_endpoints():
    g = _labelled_graph()
    sub = incident_subgraph(g, 0.5, np.random.default_rng(1))
    assert sub.n_edges == 3
    kept = sub.attribute
    ends = {int(kept[c]) for c in sub.edge_child} | {int(kept[p]) for p in sub.out_parent}
    assert ends == set(kept.tolist())
    full = incident_subgraph(g, 0.5, np.random.default_rng(1), keep_isolated=True)
    assert full.n_vertices == 6 and full.n_edges == 3
    sub.check()
    full.check()


def test_subgraph_seed_degree_rule(asym):
    g = generate_P(asym, 50, rng=3)
    assert induced_subgraph(g, 1.0).degree[0] == g.degree[0]
    g2 = incident_subgraph(g, 1.0, keep_isolated=True)
    assert g2 == g


def test_top_share_hand_example():
    g = Graph.star([0, 1, 1, 1])
    assert list(g.degree) == [3, 1, 1, 1]
    assert minority_top_share(g, 0.25) == 1.0
    # the 0.75 percentile is degree 1, so the whole graph is counted
    assert minority_top_share(g, 0.25, rule="percentile") == 0.25
    assert minority_top_share(g, 0.2, rule="percentile") == 1.0


def test_top_share_ties_prefer_younger():
    g = Graph.from_edges([1, 0, 1, 0, 1], [(1, 0), (2, 0), (3, 1), (4, 1)], seed_size=1)
    # vertices 0 and 1 both have degree 3 counting the root's unit
    assert g.degree[0] == g.degree[1] == 3
    assert minority_top_share(g, 0.2) == 1.0


def test_top_share_guards():
    with pytest.raises(ParamError):
        minority_top_share(Graph.singleton(), 1.0)
    with pytest.raises(DimensionMismatch):
        minority_top_share(Graph.star([0, 2]), 0.5)
    with pytest.raises(ParamError):
        minority_top_share(Graph.singleton(), 0.5, rule="median")


def test_full_retention_has_no_bias(asym):
    g = generate_P(asym, 5000, rng=4)
    for kind in ("induced_nodes", "incident_edges"):
        assert empirical_bias(g, SchemeSpec(kind, p=1.0), 0.01, rng=1) == 0.0
    with pytest.raises(ParamError):
        empirical_bias(g, SchemeSpec("uniform"), 0.01)


def test_identical_rows_bias_near_zero():
    params = ModelParams(pi=[0.3, 0.7], kappa=[[1.0, 2.0], [1.0, 2.0]])
    vals = []
    for i in range(8):
        g = generate_P(params, 50_000, rng=RngStream(31, i))
        vals.append(empirical_bias(g, SchemeSpec("incident_edges", p=0.5), 0.01, rng=RngStream(32, i),
                                   rule="percentile", keep_isolated=True))
    vals = np.array(vals)
    assert abs(vals.mean()) < 4 * vals.std(ddof=1) / np.sqrt(len(vals)) + 0.005


def test_neighbor_limit_differs_from_degree_share(asym):
    # exact conditional probabilities given the graph, no sampling noise
    g = generate_P(asym, 200_000, rng=RngStream(20261016, 451))
    ch, pa = g.edge_child, g.out_parent
    nb = np.bincount(ch, minlength=g.n_vertices) + np.bincount(pa, minlength=g.n_vertices)
    w = np.zeros(g.n_vertices)
    np.add.at(w, pa, 1 / nb[ch])
    np.add.at(w, ch, 1 / nb[pa])
    two_step = w[g.attribute == 0].sum() / g.n_vertices
    share = g.degree[g.attribute == 0].sum() / g.degree.sum()
    assert two_step - share > 0.02
