import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.graphs import generate
from rumorlab.markov import gamma_prime, walk_moment_chains
from rumorlab.walks import (RoundRandomness, forward_walk, pattern_weight, reversed_candidates,
                            reversed_walk, sample_pattern, thresholds, walk_endpoints)


def test_pattern_weight():
    assert pattern_weight([True, False, True], 0.25) == pytest.approx(0.25 * 0.75 * 0.25)
    total = sum(pattern_weight(S, 0.3) for S in itertools.product([0, 1], repeat=4))
    assert total == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sample_pattern(1.0, 3, np.random.default_rng(0))


def test_forward_walk_follows_pushes():
    g = generate("cycle", 5)
    rr = RoundRandomness(np.array([[0] * 5, [1] * 5, [1] * 5]), np.zeros((3, 5), dtype=np.uint64))
    path = forward_walk(g, 0, [True, True, False], rr)
    assert path == [0, int(g.padded[0, 0]), int(g.padded[g.padded[0, 0], 1]), int(g.padded[g.padded[0, 0], 1])]
    assert forward_walk(g, 3, [False] * 3, rr) == [3, 3, 3, 3]


def test_reversed_walk_on_k2():
    # in K2 the other endpoint always pushes to p with a = b, so reversed steps always move
    g = generate("complete", 2)
    rr = RoundRandomness(np.zeros((4, 2), dtype=np.int64), np.zeros((4, 2), dtype=np.uint64))
    assert reversed_walk(g, 0, [True, True], rr) == [0, 1, 0]
    assert reversed_candidates(g, np.zeros(2, int), np.zeros(2, int), 0) == [1]
    with pytest.raises(ValueError):
        reversed_walk(g, 0, [True], RoundRandomness(np.zeros((3, 2), int), np.zeros((3, 2), np.uint64)))


def test_thresholds():
    star = generate("star", 4)
    thr = thresholds(star)
    assert thr[0] == 2**64 - 1
    assert abs(float(thr[1]) / 2**64 - (2 / 3) ** 2) < 1e-12


def test_reversed_single_step_exact_p3():
    # enumerate every round-pair label on P3 and compare with the M3 kernel (gamma = 1)
    g = generate("path", 3)
    D = g.Delta
    _, _, M3, _ = walk_moment_chains(g, 1.0)
    thr = [float(t) / 2**64 for t in thresholds(g)]
    for p in range(3):
        dist = np.zeros(3)
        for fa in itertools.product(range(D), repeat=3):
            for fb in itertools.product(range(D), repeat=3):
                cands = reversed_candidates(g, np.array(fa), np.array(fb), p)
                w = 1 / D ** 6
                if len(cands) == 1:
                    dist[cands[0]] += w * thr[p]
                    dist[p] += w * (1 - thr[p])
                else:
                    dist[p] += w
        assert np.allclose(dist, M3.P[p], atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_walk_endpoints_are_distributions(seed, k):
    g = generate("cycle", 6)
    rng = np.random.default_rng(seed)
    for direction in ("forward", "reversed"):
        d = walk_endpoints(g, 0, k, 0.3, 500, rng, direction)
        assert abs(d.sum() - 1) < 1e-12 and d.min() >= 0


def test_reversed_walk_scalar_matches_vectorized_distribution():
    g = generate("complete", 5)
    rng = np.random.default_rng(4)
    k, trials = 3, 4000
    ends = np.zeros(5)
    for _ in range(trials):
        rr = RoundRandomness.uniform(g, 2 * k, rng)
        ends[reversed_walk(g, 0, [True] * k, rr)[-1]] += 1
    vec = walk_endpoints(g, 0, k, 1.0 - 1e-12, 40000, rng, "reversed")
    _, _, M3, _ = walk_moment_chains(g, 1.0 - 1e-12)
    exact = M3.power_row(0, k)
    assert np.abs(ends / trials - exact).max() < 0.03
    assert np.abs(vec - exact).max() < 0.01
