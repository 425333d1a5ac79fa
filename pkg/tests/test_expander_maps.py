import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rumorlab.expander_maps import (UnbalancedExpander, collision_count, dispersion_check,
                                    expansion_certify, gamma)


def test_gamma_examples():
    e = UnbalancedExpander(3, 1)
    assert gamma(e, 4, 2) == 0  # 4 = 1 + 1*3 -> p(x) = x + 1
    assert all(gamma(e, 0, y) == 0 for y in range(3))
    with pytest.raises(IndexError):
        gamma(e, 9, 0)
    with pytest.raises(IndexError):
        gamma(e, 0, 3)


def test_packed_block_discipline():
    e = UnbalancedExpander(5, 2, packed=True)
    for u in range(0, e.N, 7):
        for y in range(e.D):
            v = gamma(e, u, y)
            assert v // 5 == y and 0 <= v < e.M


@pytest.mark.parametrize("q,t", [(3, 1), (5, 1), (5, 2), (7, 1), (11, 1)])
def test_collision_bound(q, t):
    e = UnbalancedExpander(q, t)
    pairs = itertools.combinations(range(e.N), 2)
    assert max(collision_count(e, u, w) for u, w in pairs) <= t


def test_certify_k1_and_k2():
    e = UnbalancedExpander(7, 1)
    assert expansion_certify(e, 1).A == e.D
    cert = expansion_certify(e, 2)
    assert cert.exhaustive and cert.examined == 49 * 48 // 2
    assert cert.A >= (1 - 1 / 7) * e.D
    assert cert.A > e.D / 2


def test_certify_sampled_reports_count():
    e = UnbalancedExpander(11, 2)
    cert = expansion_certify(e, 4, samples=300, rng=np.random.default_rng(0))
    assert not cert.exhaustive and cert.examined == 300
    with pytest.raises(ValueError):
        expansion_certify(e, 4)


def test_dispersion_examples():
    e = UnbalancedExpander(7, 1)
    assert dispersion_check(e, [13], 0.5) == 1.0
    assert dispersion_check(e, [0, 1, 2, 3], 0.0) == 1.0  # distinct constants


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 48), min_size=3, max_size=3, unique=True))
def test_dispersion_meets_certified_bound(S):
    e = UnbalancedExpander(7, 1)
    eps = _certified_eps()
    assert dispersion_check(e, S, eps) >= 1 - np.sqrt(eps) - 1e-12


_CACHE = {}


def _certified_eps():
    if "eps" not in _CACHE:
        _CACHE["eps"] = expansion_certify(UnbalancedExpander(7, 1), 3).epsilon
    return _CACHE["eps"]
