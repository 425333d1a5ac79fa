"""Fully random push, pull and push-pull."""
from __future__ import annotations

import numpy as np

from ..graphs import Graph
from ..pseudorandom import bits_for
from .common import SpreadState, SpreadTrace, round_limit


def run_fully_random(g: Graph, s: int, T: int | None, rng: np.random.Generator) -> SpreadTrace:
    """Informed nodes push to a uniform padded-list index; self-loop entries are no-ops."""
    st = SpreadState(g, s, "fully-random", T)
    per_draw = bits_for(g.Delta)
    for _ in range(round_limit(T)):
        if st.complete:
            break
        senders = np.flatnonzero(st.informed)
        idx = rng.integers(0, g.Delta, size=len(senders))
        st.budget.draw("push-index", per_draw * len(senders))
        targets = g.padded[senders, idx]
        real = targets != senders
        st.finish_round(targets[real], int(real.sum()))
    return st.close()


def run_pull(g: Graph, s: int, T: int | None, rng: np.random.Generator) -> SpreadTrace:
    st = SpreadState(g, s, "pull", T)
    per_draw = bits_for(g.Delta)
    for _ in range(round_limit(T)):
        if st.complete:
            break
        askers = st.uninformed
        idx = rng.integers(0, g.Delta, size=len(askers))
        st.budget.draw("pull-index", per_draw * len(askers))
        asked = g.padded[askers, idx]
        real = asked != askers
        got = askers[real & st.informed[asked]]
        st.finish_round(got, int(real.sum()))
    return st.close()


def run_push_pull(g: Graph, s: int, T: int | None, rng: np.random.Generator) -> SpreadTrace:
    st = SpreadState(g, s, "push-pull", T)
    per_draw = bits_for(g.Delta)
    for _ in range(round_limit(T)):
        if st.complete:
            break
        idx = rng.integers(0, g.Delta, size=g.n)
        st.budget.draw("push-pull-index", per_draw * g.n)
        chosen = g.padded[np.arange(g.n), idx]
        real = chosen != np.arange(g.n)
        before = st.informed.copy()
        pushed = chosen[before & real]
        pulled = np.flatnonzero(~before & real & before[chosen])
        st.finish_round(np.concatenate([pushed, pulled]), int(real.sum()))
    return st.close()


def fully_random_informed(g: Graph, s: int, T: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Informed indicator after T push rounds for many independent trials, shape (trials, n)."""
    informed = np.zeros((trials, g.n), dtype=bool)
    informed[:, s] = True
    rows = np.repeat(np.arange(trials)[:, None], g.n, axis=1)
    nodes = np.broadcast_to(np.arange(g.n), (trials, g.n))
    for _ in range(T):
        idx = rng.integers(0, g.Delta, size=(trials, g.n))
        targets = g.padded[nodes, idx]
        src = informed.copy()
        informed[rows[src], targets[src]] = True
    return informed
