import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.graphs import generate, petersen, spectral_profile, regularize
from rumorlab.markov import (PreconditionError, StochasticChain, chain_gap, chain_of_graph,
                             default_gamma, doeblin, gamma_limit, gamma_prime, horizon,
                             informing_bound, lazy, lazy_coupling, mixing_bound, mixing_check,
                             off_diagonal_max, stationary, stationary_bound, stationary_check,
                             tensor, walk_moment_chains)

CORPUS = [generate("complete", 8), generate("cycle", 8), petersen()]


def test_chain_of_graph_is_reg_walk():
    star = generate("star", 4)
    M = chain_of_graph(star)
    assert np.allclose(M.P, M.P.T)
    assert np.allclose(np.diag(M.P), [0, 2 / 3, 2 / 3, 2 / 3])
    assert abs(chain_gap(M) - spectral_profile(regularize(star), "bound").alpha) < 1e-12


def test_doeblin_moves_together_on_diagonal():
    M = chain_of_graph(generate("cycle", 5))
    Q = doeblin(M).P.reshape(5, 5, 5, 5)
    for u in range(5):
        off = Q[u, u] - np.diag(np.diag(Q[u, u]))
        assert np.allclose(off, 0)
        assert np.allclose(np.diag(Q[u, u]), M.P[u])
    assert np.allclose(Q[0, 2], np.outer(M.P[0], M.P[2]))


def test_lazy_coupling_marginals():
    M = chain_of_graph(petersen())
    C = lazy_coupling(doeblin(M), 0.2, 0.3)
    first, second = C.marginals()
    assert np.allclose(first, lazy(M, 0.2).P)
    assert np.allclose(second, lazy(M, 0.3).P)


def test_tensor_and_validation():
    M = chain_of_graph(generate("complete", 3))
    assert np.allclose(tensor(M, M).P, np.kron(M.P, M.P))
    with pytest.raises(ValueError):
        StochasticChain(np.array([[0.5, 0.4], [0.5, 0.5]]), 2)
    with pytest.raises(ValueError):
        lazy(M, 1.5)


@pytest.mark.parametrize("g", CORPUS, ids=["K8", "C8", "Petersen"])
def test_mixing_bound_dominates(g):
    rows = mixing_check(g, "auto", 200)
    assert all(r.measured <= r.bound for r in rows)


def test_mixing_precondition():
    g = generate("cycle", 8)
    with pytest.raises(PreconditionError):
        mixing_check(g, gamma_limit(g) * 1.5, 3)
    assert len(mixing_check(g, gamma_limit(g) * 1.5, 3, strict=False)) == 4


def test_mixing_oracle_by_matrix_power():
    g = petersen()
    gam = gamma_limit(g)
    M = chain_of_graph(g)
    P = lazy_coupling(doeblin(M), gam, gam, M.P, M.P).P
    R = np.linalg.matrix_power(P, 17)
    want = np.sqrt(((R - 1 / 100) ** 2).sum(axis=1)).max()
    got = mixing_check(g, gam, 17)[17].measured
    assert abs(got - want) < 1e-12


@pytest.mark.parametrize("g", CORPUS, ids=["K8", "C8", "Petersen"])
def test_stationary_closeness(g):
    dist, bound = stationary_check(g, "auto")
    assert dist <= bound + 1e-9


def test_stationary_oracle_eigenvector():
    g = generate("cycle", 6)
    M = chain_of_graph(g)
    C = lazy_coupling(doeblin(M), 0.2, 0.2, M.P, M.P)
    w, V = np.linalg.eig(C.P.T)
    pi = np.real(V[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    assert np.allclose(stationary(C), pi, atol=1e-10)


def test_parameters():
    g = generate("complete", 8)
    assert gamma_prime(2) == 0.5
    assert off_diagonal_max(chain_of_graph(g)) == pytest.approx(1 / 7)
    assert 0 < default_gamma(g) <= 1 / 3
    assert horizon(g, 1 / 3) > 1
    assert mixing_bound(0, 0.1, 1.0, 4) == pytest.approx(1 + stationary_bound(0.1, 1.0, 4))


def test_informing_bound_range():
    g = petersen()
    vals = [informing_bound(g, 0, 7, k, 1 / 3) for k in (1, 5, 20, 60)]
    assert all(0 <= v <= 1 for v in vals)
    assert vals[-1] > 0.9


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 7), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(0, 10))
def test_moment_chains_are_stochastic(n, g1, g2, k):
    g = generate("cycle", n)
    M = chain_of_graph(g)
    C = lazy_coupling(doeblin(M), g1, g2, M.P, M.P)
    row = C.power_row(0, k)
    assert abs(row.sum() - 1) < 1e-9 and row.min() >= -1e-12
    for chain in walk_moment_chains(g, g1):
        assert np.allclose(chain.P.sum(axis=1), 1)
