import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.adversary import (Infeasible, TabulatedProtocol, balanced, build_pull_adversary,
                                build_push_adversary, build_pushpull_adversary, ordering_json,
                                pairwise_push_table, random_ordering, search_defeating_ordering,
                                simulate_table, verify_adversary)
from rumorlab.graphs import generate


def test_table_range_checked():
    g = generate("complete", 4)
    bad = np.full((2, 4, 1), 3)
    with pytest.raises(ValueError):
        TabulatedProtocol(1, 1, push=bad).check_range(g)
    with pytest.raises(ValueError):
        TabulatedProtocol(1, 1)
    with pytest.raises(ValueError):
        TabulatedProtocol(2, 1, push=np.zeros((2, 4, 1), int))


def test_push_k4():
    g = generate("complete", 4)
    for seed in range(20):
        P = TabulatedProtocol.random(1, 1, g, np.random.default_rng(seed))
        res = build_push_adversary(g, 0, P)
        assert res.theorem_condition and res.victim != 0
        out = verify_adversary(res.ordering, P, 0)
        assert out["defeated"] and res.victim in out["never_informed"]


def test_push_cycle_deterministic():
    g = generate("cycle", 7)
    P = TabulatedProtocol.random(0, 1, g, np.random.default_rng(1))
    res = build_push_adversary(g, 3, P)
    assert res.theorem_condition and verify_adversary(res.ordering, P, 3)["defeated"]


def test_push_infeasible_when_all_indices_used():
    g = generate("complete", 4)
    tab = np.zeros((4, 4, 1), dtype=np.int64)
    tab[:, :, 0] = np.arange(4)[:, None] % 3  # seeds cover every index
    P = TabulatedProtocol(2, 1, push=tab[:4])
    with pytest.raises(Infeasible):
        build_push_adversary(g, 0, P)


def test_deterministic_on_p2_completes():
    g = generate("path", 2)
    P = TabulatedProtocol(0, 1, push=np.zeros((1, 2, 1), int))
    for _ in range(3):
        assert verify_adversary(random_ordering(g, np.random.default_rng(0)), P, 0)["spread_completed"]


def test_uniform_table_k4_completes():
    g = generate("complete", 4)
    rng = np.random.default_rng(3)
    P = TabulatedProtocol.random(4, 8, g, rng)
    out = verify_adversary(random_ordering(g, rng), P, 0)
    assert out["spread_completed"]


def test_pull_adversary():
    g = generate("complete", 8)
    P = TabulatedProtocol.random(1, 2, g, np.random.default_rng(0), mode="pull")
    res = build_pull_adversary(g, 0, P)
    out = verify_adversary(res.ordering, P, 0)
    assert out["defeated"] and out["never_informed"] == list(range(1, 8))


def test_pushpull_k16():
    g = generate("complete", 16)
    rng = np.random.default_rng(0)
    P = TabulatedProtocol.random(1, 2, g, rng, mode="push-pull")
    res = build_pushpull_adversary(g, 0, P, rng)
    assert len(res.cut) == 8 and 0 in res.cut and balanced(g, set(res.cut))
    out = verify_adversary(res.ordering, P, 0, res.cut)
    assert out["defeated"] and out["cut_held"]
    for x in range(2):
        for informed in simulate_table(res.ordering, P, 0, x):
            assert set(np.flatnonzero(informed)) <= set(res.cut)
    d = json.loads(ordering_json(res))
    assert sorted(d["ordering"]["0"]) == list(range(1, 16))


def test_pushpull_infeasible_l():
    g = generate("complete", 16)
    rng = np.random.default_rng(0)
    P = TabulatedProtocol.random(6, 4, g, rng, mode="push-pull")
    with pytest.raises(Infeasible):
        build_pushpull_adversary(g, 0, P, rng)


def test_library_table_export():
    g = generate("complete", 4)
    P = pairwise_push_table(g, 3, 3)
    assert P.push.shape == (16, 4, 3)
    P.check_range(g)


def test_search_finds_nothing_above_threshold():
    g = generate("complete", 4)
    rng = np.random.default_rng(1)
    P = TabulatedProtocol.random(4, 8, g, rng)
    assert not search_defeating_ordering(g, P, 0, rng, budget=40)["found"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([5, 6, 8]))
def test_soundness_property(seed, n):
    g = generate("complete", n)
    rng = np.random.default_rng(seed)
    P = TabulatedProtocol.random(1, 1, g, rng)
    try:
        res = build_push_adversary(g, 0, P)
    except Infeasible:
        return
    assert verify_adversary(res.ordering, P, 0)["defeated"]
