from __future__ import annotations

import numpy as np
import pytest

from attrinet.errors import FringeNotTree, ParamError
from attrinet.generate import generate_P
from attrinet.model import Graph, ModelParams, RngStream
from attrinet.stats import (
    GraphCensus,
    census,
    compare_fringe,
    convergence_track,
    fringe_census,
    geometric_checkpoints,
    homophily_statistics,
    total_variation,
)
from attrinet.theory import FringeTree, solve, solve_eta


def test_singleton_census():
    c = census(Graph.singleton(1), K=2)
    assert c.y_tilde.tolist() == [0.0, 0.5]
    assert c.degree_hist.tolist() == [[0, 0], [0, 1]]
    assert c.attr_counts.tolist() == [0, 1]
    assert np.isnan(c.first_deg[0]) and c.first_deg[1] == 1


def test_path_heterophily():
    g = Graph.from_edges([0, 1, 1], [(1, 0), (2, 1)])
    c = census(g)
    assert c.edge_counts.tolist() == [[0, 1], [1, 1]]
    assert c.heterophily_H[0, 1] == pytest.approx(0.75)
    assert c.heterophily_H[1, 0] == pytest.approx(0.75)
    h = homophily_statistics(g.attribute, g.edge_child, g.out_parent, 2)
    assert h["p_n"] == pytest.approx(2 / 3)
    assert h["D"][1] == pytest.approx(1 / (1 * (2 / 3)))


def test_census_invariants(asym):
    g = generate_P(asym, 20_000, rng=np.random.default_rng(1))
    c = census(g, fringe_cap=3)
    assert c.degree_hist.sum() == g.n_vertices
    assert c.degree_hist.sum(axis=1).tolist() == c.attr_counts.tolist()
    assert c.y_tilde.sum() == pytest.approx(g.degree.sum() / (2 * g.n_vertices))
    assert np.triu(c.edge_counts).sum() == g.n_edges
    # every vertex has exactly one fringe, of some size, and those of size <= cap are counted
    sizes = {code: FringeTree.from_canonical(code).size for code in c.fringe_counts}
    assert sum(c.fringe_counts.values()) <= g.n_vertices
    assert all(s <= 3 for s in sizes.values())


def test_fringe_cap_one_counts_leaves(asym):
    g = generate_P(asym, 5000, rng=np.random.default_rng(2))
    f = fringe_census(g, 1)
    leaves = np.sum(g.in_degree() == 0)
    assert sum(f.values()) == leaves
    for a in range(2):
        assert f.get(FringeTree(a).canonical(), 0) == np.sum((g.in_degree() == 0) & (g.attribute == a))


def test_fringe_census_small_tree():
    g = Graph.from_edges([0, 1, 0, 1], [(1, 0), (2, 0), (3, 2)])
    f = fringe_census(g, 4)
    assert sum(f.values()) == 4
    assert f[FringeTree(0, (FringeTree(1),)).canonical()] == 1
    assert f[FringeTree(1).canonical()] == 2
    whole = FringeTree(0, (FringeTree(1), FringeTree(0, (FringeTree(1),))))
    assert f[whole.canonical()] == 1


def test_fringe_census_needs_tree():
    p = ModelParams(pi=[1.0], kappa=[[1.0]], m=[2])
    with pytest.raises(FringeNotTree):
        fringe_census(generate_P(p, 10, rng=1), 2)


def test_census_json_round_trip(asym):
    g = generate_P(asym, 2000, rng=3)
    c = census(g, fringe_cap=2)
    d = GraphCensus.from_dict(c.to_dict())
    assert d.to_json() == c.to_json()
    assert np.array_equal(d.degree_hist, c.degree_hist)
    assert d.fringe_counts == c.fringe_counts


def test_degree_pmf_matches_law(ba):
    from attrinet.theory import degree_law

    g = generate_P(ba, 200_000, rng=RngStream(20261016, 99))
    pmf = census(g).degree_pmf(0, 10)
    se = np.sqrt(2 / 3 / 3 / g.n_vertices)
    assert abs(pmf[1] - 2 / 3) < 5 * se
    law = degree_law(0, solve(ba), ba).pmf(np.arange(1, 11))
    assert total_variation(pmf[1:], law) < 0.01


def test_total_variation():
    assert total_variation(np.array([1.0]), np.array([0.5, 0.5])) == 0.5
    assert total_variation(np.array([0.2, 0.8]), np.array([0.2, 0.8])) == 0.0


def test_checkpoints():
    cps = geometric_checkpoints(1000)
    assert cps[0] == 16 and cps[-1] == 1000
    assert np.all(np.diff(cps) > 0)


def test_convergence_single_type(ba):
    n = 100_000
    tr = convergence_track(ba, n, rng=np.random.default_rng(6))
    t = tr.checkpoints
    assert tr.y_tilde[:, 0] == pytest.approx((2 * t + 1) / (2 * (t + 1)), abs=1e-14)
    assert tr.first_deg_slope[0] == pytest.approx(0.5, abs=0.1)
    rows = tr.to_rows()
    assert len(rows) == len(t) and rows[-1]["n"] == n


def test_convergence_prefix_matches_regrowth(asym):
    tr = convergence_track(asym, 3000, checkpoints=[500, 3000], rng=np.random.default_rng(8))
    g = generate_P(asym, 3000, rng=np.random.default_rng(8))
    assert tr.y_tilde[-1] == pytest.approx(census(g).y_tilde, abs=1e-15)
    assert tr.max_deg[-1].tolist() == census(g).max_deg.tolist()


def test_convergence_asymmetric_improves(asym):
    eta = solve_eta(asym)
    better = 0
    reps = 50
    for i in range(reps):
        tr = convergence_track(asym, 100_000, checkpoints=[1_000, 100_000], rng=RngStream(20261016, (492, i)))
        err = np.abs(tr.y_tilde - eta).sum(axis=1)
        better += err[1] < err[0]
    assert better >= 0.95 * reps


def test_convergence_guards(ba):
    with pytest.raises(ParamError):
        convergence_track(ba.with_(gamma=0), 100)
    with pytest.raises(ParamError):
        convergence_track(ba, 100, checkpoints=[200])


def test_compare_fringe_singleton(asym):
    sol = solve(asym)
    g = generate_P(asym, 50_000, rng=np.random.default_rng(9))
    rows = compare_fringe(census(g, fringe_cap=1), sol, asym)
    assert len(rows) == 2
    for r in rows:
        b = FringeTree.from_canonical(r.tree).attr
        assert r.theory == pytest.approx(2 * asym.pi[b] / (2 + sol.phi_a[b]))
        assert abs(r.z) < 4


def test_single_type_leaf_fraction(ba):
    g = generate_P(ba, 200_000, rng=np.random.default_rng(10))
    rows = compare_fringe(census(g, fringe_cap=1), solve(ba), ba)
    assert rows[0].theory == pytest.approx(2 / 3)
    assert abs(rows[0].empirical - 2 / 3) < 0.005


def test_compare_fringe_needs_counts(asym):
    with pytest.raises(ParamError):
        compare_fringe(census(Graph.singleton()), solve(asym), asym)
