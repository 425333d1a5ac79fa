"""Dense stochastic matrices, couplings, mixing diagnostics and the informing bound.

Pair states (u, w) are flattened as u * n + w, so M (x) I is np.kron(M, I).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, regularize, spectral_profile

ROW_TOL = 1e-12


class PreconditionError(ValueError):
    pass


@dataclass
class StochasticChain:
    P: np.ndarray
    n: int  # number of graph nodes; P is n x n or n^2 x n^2

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        if self.P.shape[0] != self.P.shape[1] or self.P.shape[0] not in (self.n, self.n * self.n):
            raise ValueError("matrix shape does not match V or V x V")
        if (self.P < -ROW_TOL).any():
            raise ValueError("negative transition probability")
        if np.abs(self.P.sum(axis=1) - 1).max() > 1e-10:
            raise ValueError("rows must sum to 1")

    @property
    def is_pair(self) -> bool:
        return self.P.shape[0] == self.n * self.n and self.n > 1

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    def power_row(self, start: int, k: int) -> np.ndarray:
        v = np.zeros(self.dim)
        v[start] = 1.0
        for _ in range(k):
            v = v @ self.P
        return v

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """First and second coordinate kernels of a coupling, read from rows (u, 0) and (0, w)."""
        n = self.n
        T = self.P.reshape(n, n, n, n)
        first = T[:, 0].sum(axis=2)
        second = T[0, :].sum(axis=1)
        return first, second


def chain_of_graph(g: Graph) -> StochasticChain:
    """Random-walk matrix of Reg(G): true neighbors 1/Delta each, the rest stays."""
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    return StochasticChain(regularize(g).adjacency() / g.Delta, g.n)


def lazy(M: StochasticChain, gamma: float) -> StochasticChain:
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    return StochasticChain((1 - gamma) * np.eye(M.dim) + gamma * M.P, M.n)


def tensor(M: StochasticChain, Mp: StochasticChain) -> StochasticChain:
    return StochasticChain(np.kron(M.P, Mp.P), M.n)


def doeblin(M: StochasticChain) -> StochasticChain:
    n = M.n
    Q = np.kron(M.P, M.P)
    for u in range(n):
        row = np.zeros(n * n)
        row[np.arange(n) * (n + 1)] = M.P[u]
        Q[u * n + u] = row
    return StochasticChain(Q, n)


def lazy_coupling(Mc: StochasticChain, gamma: float, gamma_p: float,
                  M: np.ndarray | None = None, Mp: np.ndarray | None = None) -> StochasticChain:
    """(1-g)(1-g')I(x)I + (1-g)g' I(x)M' + g(1-g') M(x)I + g g' M''."""
    if not (0 <= gamma <= 1 and 0 <= gamma_p <= 1):
        raise ValueError("laziness parameters must lie in [0, 1]")
    if M is None or Mp is None:
        first, second = Mc.marginals()
        M = first if M is None else M
        Mp = second if Mp is None else Mp
    I = np.eye(Mc.n)
    P = ((1 - gamma) * (1 - gamma_p) * np.kron(I, I)
         + (1 - gamma) * gamma_p * np.kron(I, Mp)
         + gamma * (1 - gamma_p) * np.kron(M, I)
         + gamma * gamma_p * Mc.P)
    return StochasticChain(P, Mc.n)


def gamma_prime(Delta: int) -> float:
    return (1 - 1 / Delta) ** (Delta - 1)


def walk_moment_chains(g: Graph, gamma: float):
    M = chain_of_graph(g)
    gp = gamma_prime(g.Delta)
    Mg = lazy(M, gp)
    M1 = lazy(M, gamma)
    M2 = lazy_coupling(doeblin(M), gamma, gamma, M.P, M.P)
    M3 = lazy(Mg, gamma)
    M4 = lazy_coupling(doeblin(Mg), gamma, gamma, Mg.P, Mg.P)
    return M1, M2, M3, M4


def chain_gap(M: StochasticChain) -> float:
    """1 - second largest eigenvalue of a symmetric chain on V."""
    ev = np.linalg.eigvalsh((M.P + M.P.T) / 2)
    return float(1 - ev[-2])


def off_diagonal_max(M: StochasticChain) -> float:
    off = M.P - np.diag(np.diag(M.P))
    return float(off.max())


def gamma_limit(g: Graph) -> float:
    """Largest gamma allowed by the mixing precondition min{1/3, alpha eta^{-1/2} / 9}."""
    M = chain_of_graph(g)
    alpha = chain_gap(M)
    eta = off_diagonal_max(M)
    return min(1 / 3, alpha / math.sqrt(eta) / 9)


def default_gamma(g: Graph, c: float = 0.001) -> float:
    alpha = chain_gap(chain_of_graph(g))
    return min(1 / 3, g.Delta ** (0.5 - c) * alpha / 9)


def horizon(g: Graph, gamma: float) -> int:
    """k = ceil((gamma gamma' alpha)^-1 beta^2 ln n) + 1."""
    alpha = chain_gap(chain_of_graph(g))
    beta = g.Delta / g.delta
    return math.ceil(beta**2 * math.log(g.n) / (gamma * gamma_prime(g.Delta) * alpha)) + 1


def mixing_bound(k: int, gamma: float, alpha: float, n: int) -> float:
    return (1 - gamma * alpha / 2) ** k + stationary_bound(gamma, alpha, n)


def stationary_bound(gamma: float, alpha: float, n: int) -> float:
    return 2 * math.sqrt(2) * gamma / alpha * n ** -1.5


@dataclass
class MixingRow:
    k: int
    measured: float
    bound: float
    worst_start: tuple[int, int]


def mixing_check(g: Graph, gamma: float | str, k_max: int, strict: bool = True) -> list[MixingRow]:
    """Worst point-mass L2 distance of L_{g,g}(Q(M))^k to uniform, next to the bound."""
    if g.n > 32:
        raise ValueError("pair chains are limited to n <= 32")
    M = chain_of_graph(g)
    limit = gamma_limit(g)
    if gamma == "auto":
        gamma = limit
    if strict and gamma > limit * (1 + 1e-12):
        raise PreconditionError(f"gamma={gamma} exceeds the precondition maximum {limit}")
    alpha = chain_gap(M)
    P = lazy_coupling(doeblin(M), gamma, gamma, M.P, M.P).P
    n = g.n
    target = np.full(n * n, 1.0 / (n * n))
    R = np.eye(n * n)
    rows = []
    for k in range(k_max + 1):
        dist = np.sqrt(((R - target) ** 2).sum(axis=1))
        i = int(np.argmax(dist))
        rows.append(MixingRow(k, float(dist[i]), mixing_bound(k, gamma, alpha, n), divmod(i, n)))
        R = R @ P
    return rows


def stationary(M: StochasticChain, tol: float = 1e-15, max_iter: int = 2_000_000) -> np.ndarray:
    """Power iteration from the uniform vector, squaring the matrix to accelerate."""
    v = np.full(M.dim, 1.0 / M.dim)
    P = M.P.copy()
    for _ in range(200):
        nxt = v @ P
        if np.abs(nxt - v).max() < tol:
            return nxt
        v = nxt
    # slow chains: repeated squaring of P reaches the fixed point quickly
    for _ in range(64):
        P = P @ P
        P /= P.sum(axis=1, keepdims=True)
        nxt = v @ P
        if np.abs(nxt - v).max() < tol:
            return nxt
        v = nxt
    return v


def stationary_check(g: Graph, gamma: float | str) -> tuple[float, float]:
    """(||pi' - pi (x) pi||_2, bound) for the lazy Doeblin chain."""
    M = chain_of_graph(g)
    if gamma == "auto":
        gamma = gamma_limit(g)
    alpha = chain_gap(M)
    chain = lazy_coupling(doeblin(M), gamma, gamma, M.P, M.P)
    pi = stationary(chain)
    n = g.n
    dist = float(np.sqrt(((pi - 1.0 / (n * n)) ** 2).sum()))
    return dist, stationary_bound(gamma, alpha, n)


def informing_bound(g: Graph, s: int, w: int, k: int, gamma: float) -> float:
    """<e_s M1^k, e_w M3^k>^2 / <e_(s,s) M2^k, e_(w,w) M4^k>, clamped to [0, 1]."""
    if g.n > 32:
        raise ValueError("pair chains are limited to n <= 32")
    M1, M2, M3, M4 = walk_moment_chains(g, gamma)
    n = g.n
    x = M1.power_row(s, k)
    y = M3.power_row(w, k)
    xx = M2.power_row(s * n + s, k)
    yy = M4.power_row(w * n + w, k)
    num = float(x @ y) ** 2
    den = float(xx @ yy)
    if den <= 0:
        return 0.0
    return min(1.0, max(0.0, num / den))


def graph_alpha(g: Graph) -> float:
    return spectral_profile(g, "bound").alpha
