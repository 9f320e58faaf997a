from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrinet.errors import BadGamma, DimensionMismatch, MalformedInput, ParamError, ZeroEntry
from attrinet.generate import generate_P
from attrinet.model import (
    Graph,
    ModelParams,
    RngStream,
    default_seed,
    deserialize_graph,
    read_graph,
    serialize_graph,
    validate_params,
    write_graph,
)


def test_single_type_accepted(ba):
    assert validate_params(ba).K == 1


def test_symmetric_two_type_accepted(sym):
    p = validate_params(sym)
    assert np.array_equal(p.kappa, [[2, 1], [1, 2]])


def test_zero_pi_entry_rejected():
    with pytest.raises(ZeroEntry):
        validate_params(ModelParams(pi=[1.0, 0.0], kappa=[[1, 1], [1, 1]]))


def test_nonpositive_kappa_rejected():
    with pytest.raises(ZeroEntry):
        validate_params(ModelParams(pi=[0.5, 0.5], kappa=[[1, 0], [1, 1]]))


def test_shape_and_gamma_errors():
    with pytest.raises(DimensionMismatch):
        validate_params(ModelParams(pi=[0.5, 0.5], kappa=[[1.0]]))
    with pytest.raises(DimensionMismatch):
        validate_params(ModelParams(pi=[0.5, 0.5], kappa=np.ones((2, 2)), m=[1, 1, 1]))
    with pytest.raises(BadGamma):
        validate_params(ModelParams(pi=[1.0], kappa=[[1.0]], gamma=2))
    with pytest.raises(ParamError):
        validate_params(ModelParams(pi=[0.6, 0.6], kappa=np.ones((2, 2))))


def test_pi_renormalized_within_tolerance():
    p = validate_params(ModelParams(pi=[0.5, 0.5 + 5e-13], kappa=np.ones((2, 2))))
    assert p.pi.sum() == pytest.approx(1.0, abs=1e-15)


def test_params_dict_round_trip_and_hash(asym):
    d = asym.to_dict()
    back = ModelParams.from_dict(d)
    assert back.param_hash() == asym.param_hash()
    assert asym.with_(pi=[0.3, 0.7]).param_hash() != asym.param_hash()
    with pytest.raises(ParamError):
        ModelParams.from_dict({**d, "extra": 1})


def test_rng_stream_reproducible_and_distinct():
    a = RngStream(42, 3).generator().random(5)
    b = RngStream(42, 3).generator().random(5)
    c = RngStream(42, 4).generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(RngStream(42, 3).child(0).generator().random(5), a)


def test_singleton_serialization():
    v, e = serialize_graph(Graph.singleton(1))
    assert v.decode().splitlines() == ["id,attribute,birth_index,degree", "0,1,0,1"]
    assert e.decode().splitlines() == ["child_id,parent_id"]


def test_path_serialization_round_trip():
    g = Graph.from_edges([0, 1, 1], [(1, 0), (2, 1)])
    v, e = serialize_graph(g)
    assert len(v.decode().splitlines()) == 4
    assert len(e.decode().splitlines()) == 3
    assert deserialize_graph(v, e) == g


def test_malformed_edges_rejected():
    v = b"id,attribute,birth_index,degree\n0,0,0,1\n1,0,1,1\n"
    with pytest.raises(MalformedInput):
        deserialize_graph(v, b"child_id,parent_id\n0,1\n")
    with pytest.raises(MalformedInput):
        deserialize_graph(v, b"child_id,parent_id\n1,5\n")
    with pytest.raises(MalformedInput):
        deserialize_graph(b"id,attr\n0,0\n", b"child_id,parent_id\n")


def test_star_seed_needs_explicit_size(tmp_path):
    params = ModelParams(pi=[0.5, 0.5], kappa=np.ones((2, 2)), m=[2, 2])
    g = generate_P(params, 50, rng=RngStream(1, 1))
    assert g.seed_size == 3
    write_graph(g, tmp_path)
    with pytest.raises(MalformedInput):
        read_graph(tmp_path)
    assert read_graph(tmp_path, seed_size=3) == g


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.integers(1, 3), tree=st.booleans())
def test_generated_graph_round_trip(seed, K, tree):
    rng = np.random.default_rng(seed)
    pi = rng.dirichlet(np.ones(K)) * 0.9 + 0.1 / K
    params = ModelParams(pi=pi / pi.sum(), kappa=rng.uniform(0.2, 3.0, (K, K)),
                         m=np.ones(K, dtype=int) if tree else rng.integers(1, 3, K))
    g = generate_P(params, 1000, rng=RngStream(seed, 0))
    g.check()
    v, e = serialize_graph(g)
    assert deserialize_graph(v, e, seed_size=g.seed_size) == g


def test_default_seed_shapes(asym):
    assert default_seed(asym, 1).attribute.tolist() == [1]
    nt = asym.with_(m=[2, 3])
    s = default_seed(nt, 1)
    assert s.n_vertices == 4 and s.out_degree.tolist() == [0, 1, 1, 1]
    with pytest.raises(DimensionMismatch):
        default_seed(nt, [0, 1])
