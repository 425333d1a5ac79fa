import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.graphs import generate, parse_graph_spec
from rumorlab.protocols import (HashingConfig, Protocol2Config, Protocol5Config, averaging_matrix,
                                averaging_matrix_exact, expander_field, good_pair_round, is_matching,
                                perp_norm, run_fully_random, run_protocol2, run_protocol3,
                                run_protocol4, run_protocol5, run_pull, run_push_pull)
from rumorlab.protocols.common import SpreadState
from rumorlab.protocols.goodpair import good_pair_probabilities, mat_mul_exact, vec_mul_exact
from rumorlab.pseudorandom import bits_for


def rng(i=0):
    return np.random.default_rng(i)


def test_fully_random_examples():
    p2 = generate("path", 2)
    tr = run_fully_random(p2, 0, 1, rng())
    assert tr.success and tr.informed_counts == [1, 2]
    k4 = generate("complete", 4)
    for i in range(20):
        assert run_fully_random(k4, 0, 1, rng(i)).informed_counts == [1, 2]


def test_fully_random_budget():
    g = generate("star", 5)
    tr = run_fully_random(g, 1, None, rng(3))
    per = bits_for(g.Delta)
    assert tr.bits == per * sum(tr.informed_counts[:-1])


def test_pull_and_push_pull():
    p2 = generate("path", 2)
    assert run_pull(p2, 0, 1, rng()).success
    k4 = generate("complete", 4)
    for i in range(20):
        assert run_push_pull(k4, 0, 1, rng(i)).informed_counts[1] >= 2


def test_push_pull_faster_than_push():
    g = generate("complete", 256)
    push = np.mean([run_fully_random(g, 0, None, rng(i)).completion_round for i in range(200)])
    pp = np.mean([run_push_pull(g, 0, None, rng(i)).completion_round for i in range(200)])
    assert pp < push


def test_monotone_informed_counts():
    g = parse_graph_spec("rreg:4:64:2")
    for tr in (run_fully_random(g, 0, None, rng()), run_pull(g, 0, None, rng())):
        assert all(a <= b for a, b in zip(tr.informed_counts, tr.informed_counts[1:]))


def test_id_rule():
    g = generate("path", 3)
    st_ = SpreadState(g, 0, "x", 4, with_ids=True)
    st_.assign_ids(np.array([0]), np.array([1]))
    st_.finish_round([1], 1)
    assert st_.ids[1] == 1
    st_.assign_ids(np.array([1]), np.array([2]))
    st_.finish_round([2], 1)
    assert st_.ids[2] == 3
    with pytest.raises(OverflowError):
        s2 = SpreadState(g, 0, "x", 4, with_ids=True)
        s2.t = 4
        s2.assign_ids(np.array([0]), np.array([1]), capacity_bits=4)


def test_protocol2_budget_and_rule():
    g = generate("complete", 32)
    for T in (10, 20):
        cfg = Protocol2Config(T)
        tr = run_protocol2(g, 0, cfg, rng())
        G, Gp = cfg.generators(g)
        assert tr.bits == 2 * Gp.seed_bits == cfg.seed_bits(g)
    with pytest.raises(ValueError):
        Protocol2Config(7)


def test_protocol2_ablation_matches_fully_random():
    g = generate("complete", 32)
    T = 40
    cfg = Protocol2Config(T, ablation=True)
    gens = cfg.generators(g)
    a = np.array([run_protocol2(g, 0, cfg, rng(i), gens).completion_round for i in range(400)], float)
    b = np.array([run_fully_random(g, 0, T, rng(10_000 + i)).completion_round for i in range(400)], float)
    se = math.sqrt(a.var() / len(a) + b.var() / len(b))
    assert abs(a.mean() - b.mean()) <= 3 * se


def test_expander_field():
    q, t = expander_field(0.25, 40)
    assert q ** (t + 1) >= 2**40 and q >= 2 * t / 0.25**2
    assert all(q % k for k in range(2, int(q**0.5) + 1))


def test_protocol3_budget_and_ids():
    g = parse_graph_spec("rreg:8:256:1")
    cfg = HashingConfig.derive("protocol3", g, 40)
    assert cfg.m & (cfg.m - 1) == 0
    for i in range(10):
        tr = run_protocol3(g, 0, cfg, rng(i))
        assert tr.bits == 40 * (bits_for(cfg.q_expander) + 2 * bits_for(cfg.p)) == cfg.seed_bits()
        ids = [u for u in tr.ids if u >= 0]
        assert len(ids) == len(set(ids)) and max(ids) < 2**40
    with pytest.raises(ValueError):
        HashingConfig("protocol3", 10, 0.25, cfg.q_expander, cfg.degree_bound, cfg.p, 12)


def test_protocol4_k2_and_budget():
    g = generate("complete", 2)
    cfg = HashingConfig.derive("protocol4", g, 4)
    for i in range(10):
        tr = run_protocol4(g, 0, cfg, rng(i))
        assert tr.completion_round == 1
        assert tr.bits == cfg.seed_bits() == 4 * (bits_for(cfg.q_expander) + cfg.generator().seed_bits)


def test_good_pair_examples():
    k2 = generate("complete", 2)
    # u=0: r=0 -> w=0 selects node 1, active; v=1: r=3 -> w=1 >= Delta selects nobody, inactive
    rnd = good_pair_round(k2, np.array([0, 3]))
    assert rnd.pairs == [(0, 1)]
    assert averaging_matrix(rnd, 2).P.tolist() == [[0.5, 0.5], [0.5, 0.5]]
    k4 = generate("complete", 4)
    assert good_pair_round(k4, np.array([0, 2, 4, 0])).pairs == []  # everyone active
    empty = good_pair_round(k4, np.array([1, 1, 1, 1]))
    assert np.array_equal(averaging_matrix(empty, 4).P, np.eye(4))


def test_averaging_matrix_example():
    k3 = generate("complete", 3)
    rnd = good_pair_round(k3, np.array([0, 5, 5]))  # 0 active selects 1; others inactive and idle
    assert rnd.pairs == [(0, 1)]
    assert averaging_matrix(rnd, 3).P.tolist() == [[.5, .5, 0], [.5, .5, 0], [0, 0, 1]]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_good_pairs_are_matchings_and_idempotent(seed):
    g = parse_graph_spec("rreg:4:16:3")
    r = np.random.default_rng(seed).integers(0, 4 * g.Delta, size=g.n)
    rnd = good_pair_round(g, r)
    assert is_matching(rnd)
    for u, v in rnd.pairs:
        assert v in g.lists[u]
    M = averaging_matrix_exact(rnd, g.n)
    assert mat_mul_exact(M, M) == M
    assert all(sum(row) == 1 for row in M) and all(M[i][j] == M[j][i] for i in range(g.n) for j in range(g.n))


def test_positivity_k8():
    g = generate("complete", 8)
    P = good_pair_probabilities(g, 37)
    off = P[~np.eye(8, dtype=bool)]
    assert off.min() * g.Delta > 0.1


def test_protocol5_k2_average():
    g = generate("complete", 2)
    run = run_protocol5(g, 0, Protocol5Config(64), rng(), with_averaging=True, exact=True, stop_at=1e-9)
    assert run.values[-1] == [Fraction(1, 2), Fraction(1, 2)]


def test_protocol5_faithful_and_conservation():
    g = parse_graph_spec("rreg:4:16:5")
    cfg = Protocol5Config(40)
    run = run_protocol5(g, 0, cfg, rng(2), with_averaging=True, exact=True, keep_rounds=True)
    v = [Fraction(int(i == 0)) for i in range(g.n)]
    for k, rnd in enumerate(run.rounds):
        # full-matrix route: v(0) times the product of every round's matrix
        v = vec_mul_exact(v, averaging_matrix_exact(rnd, g.n))
        assert v == run.values[k + 1]
        assert sum(run.values[k + 1]) == 1
    norms = run.trace.extras["perp_norms"]
    assert all(b <= a + 1e-15 for a, b in zip(norms, norms[1:]))
    assert run.trace.bits == cfg.seed_bits(g)
    assert run.trace.extras["stated_seed_bits"] == 2 * run.trace.bits


def test_protocol5_spreads_and_distinct_seeds():
    g = parse_graph_spec("rreg:8:64:1")
    cfg = Protocol5Config(400)
    gens = cfg.generators(g)
    done = [run_protocol5(g, 0, cfg, rng(i), generators=gens).trace.success for i in range(20)]
    assert all(done)


def test_determinism():
    g = parse_graph_spec("rreg:8:128:1")
    cfg = HashingConfig.derive("protocol4", g, 40)
    a = run_protocol4(g, 0, cfg, rng(9)).to_json()
    b = run_protocol4(g, 0, cfg, rng(9)).to_json()
    assert a == b
    assert perp_norm([1, 1, 1]) == 0
