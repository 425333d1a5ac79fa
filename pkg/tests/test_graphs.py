import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.graphs import (Graph, GraphError, conductance_exact, generate, jacobi_eigenvalues,
                             parse_graph_spec, petersen, read_edge_list, regularize,
                             spectral_profile, write_edge_list)


def brute_conductance(g):
    best = math.inf
    vol = g.deg.sum()
    for r in range(1, g.n):
        for S in itertools.combinations(range(g.n), r):
            S = set(S)
            cut = sum(1 for u in S for v in g.lists[u] if v not in S)
            vs = sum(g.deg[u] for u in S)
            best = min(best, cut / min(vs, vol - vs))
    return best


def dense_alpha(g):
    A = np.zeros((g.n, g.n))
    for u, v in g.edges:
        A[u, v] = A[v, u] = 1
    A += np.diag(g.Delta - g.deg)
    return 1 - np.sort(np.linalg.eigvalsh(A / g.Delta))[-2]


def test_profile_examples():
    c4 = spectral_profile(generate("cycle", 4))
    assert abs(c4.alpha - 1) < 1e-12 and abs(c4.lambda_2) < 1e-12
    k4 = spectral_profile(generate("complete", 4))
    assert abs(k4.alpha - 4 / 3) < 1e-12 and abs(k4.phi - 2 / 3) < 1e-12 and k4.beta == 1
    assert spectral_profile(generate("star", 4)).beta == 3


def test_generators():
    k4 = generate("complete", 4)
    assert k4.m == 6 and k4.Delta == k4.delta == 3
    q3 = generate("hypercube", 8)
    assert q3.m == 12 and q3.Delta == q3.delta == 3
    p = petersen()
    assert p.n == 10 and p.m == 15 and p.Delta == p.delta == 3
    with pytest.raises(GraphError):
        generate("cycle", 2)
    with pytest.raises(GraphError):
        generate("random-regular", 5, d=3)


def test_random_regular_certified_gap():
    g = parse_graph_spec("rreg:8:1024:1")
    assert g.Delta == g.delta == 8 and g.is_connected()
    assert spectral_profile(g, "bound").alpha >= 0.2
    assert parse_graph_spec("rreg:8:1024:1").edges == g.edges


def test_regularize():
    k4 = generate("complete", 4)
    assert regularize(k4).loops().tolist() == [0, 0, 0, 0]
    star = regularize(generate("star", 4))
    assert star.loops().tolist() == [0, 2, 2, 2]
    assert np.allclose(star.adjacency().sum(axis=1), 3)


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph(2, [[1], []])
    with pytest.raises(GraphError):
        Graph(2, [[0], [1]])
    with pytest.raises(GraphError):
        Graph(3, [[1, 1], [0], []])
    g = generate("path", 3)
    assert g.padded.tolist() == [[1, 0], [0, 2], [1, 2]]


def _random_connected(rng, n, p):
    while True:
        h = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if nx.is_connected(h):
            return Graph.from_edges(n, h.edges())


def test_conductance_and_gap_against_oracles():
    rng = np.random.default_rng(2)
    for _ in range(8):
        g = _random_connected(rng, int(rng.integers(4, 10)), 0.5)
        prof = spectral_profile(g, "exact")
        assert abs(prof.phi - brute_conductance(g)) < 1e-12
        assert abs(spectral_profile(regularize(g), "bound").alpha - dense_alpha(g)) < 1e-10
        plain = nx.normalized_laplacian_matrix(nx.Graph(g.edges), nodelist=range(g.n)).toarray()
        assert abs(prof.alpha - np.sort(np.linalg.eigvalsh(plain))[1]) < 1e-10
        assert prof.phi_lower - 1e-12 <= prof.phi <= prof.phi_upper + 1e-12


def test_regularization_gap_lemma_sample():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = _random_connected(rng, int(rng.integers(3, 17)), 0.35)
        beta = g.Delta / g.delta
        alpha_g = spectral_profile(g, "bound").alpha
        assert spectral_profile(regularize(g), "bound").alpha >= alpha_g / beta**2 - 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_jacobi_matches_numpy(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    assert np.allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-9)


def test_edge_list_roundtrip(tmp_path):
    g = parse_graph_spec("er:12:0.4:5")
    path = tmp_path / "g.edges"
    write_edge_list(g, str(path))
    h = read_edge_list(str(path))
    assert h.edges == g.edges
    assert parse_graph_spec(str(path)).n == 12


def test_with_ordering_requires_permutation():
    g = generate("complete", 4)
    h = g.with_ordering([[3, 2, 1], [0, 2, 3], [3, 1, 0], [2, 1, 0]])
    assert h.padded[0].tolist() == [3, 2, 1]
    with pytest.raises(GraphError):
        g.with_ordering([[1, 2], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
