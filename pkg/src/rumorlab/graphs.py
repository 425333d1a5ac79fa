"""Graphs with padded adjacency lists, spectral profiles and generators.

Every node's list has length Delta = max degree: its true neighbors first (in
the chosen order) followed by Delta - deg(u) copies of the node itself.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np


class GraphError(ValueError):
    pass


class Graph:
    def __init__(self, n: int, neighbor_lists: Sequence[Sequence[int]], regularized: bool = False,
                 meta: dict | None = None):
        self.n = int(n)
        lists = [list(map(int, nb)) for nb in neighbor_lists]
        if len(lists) != self.n:
            raise GraphError("need one neighbor list per node")
        for u, nb in enumerate(lists):
            if len(set(nb)) != len(nb) or u in nb:
                raise GraphError(f"node {u}: lists must be simple without self-loops")
            for v in nb:
                if not 0 <= v < self.n:
                    raise GraphError(f"node {u}: neighbor {v} out of range")
        sets = [set(nb) for nb in lists]
        for u, nb in enumerate(lists):
            for v in nb:
                if u not in sets[v]:
                    raise GraphError(f"edge {u}-{v} is not symmetric")
        self.lists = lists
        self.deg = np.array([len(nb) for nb in lists], dtype=np.int64)
        self.Delta = int(self.deg.max()) if self.n else 0
        self.delta = int(self.deg.min()) if self.n else 0
        self.regularized = regularized
        self.meta = dict(meta or {})
        padded = np.empty((self.n, max(self.Delta, 1)), dtype=np.int64)
        for u, nb in enumerate(lists):
            padded[u, : len(nb)] = nb
            padded[u, len(nb):] = u
        self.padded = padded

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], meta: dict | None = None) -> "Graph":
        lists: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            lists[u].append(v)
            lists[v].append(u)
        return cls(n, [sorted(nb) for nb in lists], meta=meta)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.lists[u] if u < v]

    @property
    def m(self) -> int:
        return int(self.deg.sum()) // 2

    def loops(self) -> np.ndarray:
        """Self-loop multiplicities that count as edges (only after regularization)."""
        return self.Delta - self.deg if self.regularized else np.zeros(self.n, dtype=np.int64)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, nb in enumerate(self.lists):
            a[u, nb] = 1.0
        a[np.diag_indices(self.n)] += self.loops()
        return a

    def with_ordering(self, lists: Sequence[Sequence[int]]) -> "Graph":
        for u, nb in enumerate(lists):
            if sorted(nb) != sorted(self.lists[u]):
                raise GraphError(f"ordering for node {u} is not a permutation of its neighbors")
        return Graph(self.n, lists, self.regularized, self.meta)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.lists[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def __repr__(self) -> str:
        name = self.meta.get("spec", "graph")
        return f"Graph({name}, n={self.n}, m={self.m}, Delta={self.Delta}, delta={self.delta})"


def regularize(g: Graph) -> Graph:
    """Reg(G): pad every node with Delta - deg(u) self-loops that count as edges."""
    return Graph(g.n, g.lists, regularized=True, meta=g.meta)


# ---- eigen-decomposition -------------------------------------------------

def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations on a dense symmetric matrix; ascending eigenvalues."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n <= 1:
        return np.diag(a).copy()
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = math.sqrt(float((np.triu(a, 1) ** 2).sum()))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


JACOBI_LIMIT = 48


def symmetric_eigenvalues(a: np.ndarray) -> np.ndarray:
    """In-repo Jacobi for small matrices, LAPACK beyond JACOBI_LIMIT."""
    if a.shape[0] <= JACOBI_LIMIT:
        return jacobi_eigenvalues(a)
    return np.linalg.eigvalsh(a)


def normalized_matrix(g: Graph) -> np.ndarray:
    a = g.adjacency()
    d = a.sum(axis=1)
    inv = 1.0 / np.sqrt(d)
    return a * inv[:, None] * inv[None, :]


@dataclass
class SpectralProfile:
    alpha: float
    lambda_2: float
    lambda_max: float
    beta: float
    phi: float | None
    phi_lower: float
    phi_upper: float
    phi_exact: bool
    avg_degree: float
    eigenvalues: list[float] = field(default_factory=list, repr=False)

    def to_dict(self, with_eigenvalues: bool = False) -> dict:
        out = asdict(self)
        if not with_eigenvalues:
            out.pop("eigenvalues")
        return out


EXACT_CONDUCTANCE_LIMIT = 20


def conductance_exact(g: Graph) -> tuple[float, int]:
    """Minimum over cuts of e(S, V-S) / min(vol S, vol V-S); returns (phi, best mask)."""
    if g.n > EXACT_CONDUCTANCE_LIMIT:
        raise GraphError(f"exact conductance limited to n <= {EXACT_CONDUCTANCE_LIMIT}")
    deg = g.deg.astype(np.int64)
    total = int(deg.sum())
    best, best_mask = math.inf, 0
    chunk = 1 << 16
    edges = g.edges
    for start in range(1, 1 << (g.n - 1), chunk):
        # fixing node n-1 outside S enumerates each cut once
        masks = np.arange(start, min(start + chunk, 1 << (g.n - 1)), dtype=np.int64)
        vol = np.zeros_like(masks)
        for u in range(g.n):
            vol += ((masks >> u) & 1) * deg[u]
        cut = np.zeros_like(masks)
        for u, v in edges:
            cut += ((masks >> u) ^ (masks >> v)) & 1
        ratio = cut / np.minimum(vol, total - vol)
        i = int(np.argmin(ratio))
        if ratio[i] < best:
            best, best_mask = float(ratio[i]), int(masks[i])
    return best, best_mask


def spectral_profile(g: Graph, conductance_mode: str = "auto") -> SpectralProfile:
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    ev = symmetric_eigenvalues(normalized_matrix(g))
    lam2 = float(ev[-2]) if g.n > 1 else 0.0
    lam_max = float(max(lam2, abs(ev[0]))) if g.n > 1 else 0.0
    alpha = 1.0 - lam2
    if conductance_mode == "auto":
        conductance_mode = "exact" if g.n <= EXACT_CONDUCTANCE_LIMIT else "bound"
    phi = None
    if conductance_mode == "exact":
        phi, _ = conductance_exact(g)
    elif conductance_mode != "bound":
        raise GraphError(f"unknown conductance mode {conductance_mode!r}")
    return SpectralProfile(
        alpha=alpha, lambda_2=lam2, lambda_max=lam_max,
        beta=g.Delta / g.delta, phi=phi,
        phi_lower=alpha / 2, phi_upper=math.sqrt(2 * alpha),
        phi_exact=phi is not None, avg_degree=float(g.deg.mean()),
        eigenvalues=[float(x) for x in ev],
    )


# ---- generators ------------------------------------------------------------

MAX_RETRIES = 1000


def _complete(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def _hypercube(n):
    dim = n.bit_length() - 1
    if n < 2 or 1 << dim != n:
        raise GraphError("hypercube size must be a power of two")
    return [(u, u ^ (1 << b)) for u in range(n) for b in range(dim) if u < u ^ (1 << b)]


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, meta={"spec": "petersen"})


def generate(kind: str, n: int, seed: int | None = None, d: int | None = None, p: float | None = None,
             min_gap: float | None = None) -> Graph:
    """Build a graph of the given family; random kinds retry until connected (and gapped)."""
    kind = kind.replace("_", "-")
    meta = {"kind": kind, "n": n}
    if kind == "complete":
        edges = _complete(n)
    elif kind == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "path":
        if n < 2:
            raise GraphError("path needs n >= 2")
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "star":
        if n < 2:
            raise GraphError("star needs n >= 2")
        edges = [(0, i) for i in range(1, n)]
    elif kind == "hypercube":
        edges = _hypercube(n)
    elif kind == "petersen":
        return petersen()
    elif kind in ("random-regular", "rreg", "erdos-renyi", "er"):
        return _random_graph(kind, n, seed, d, p, min_gap, meta)
    else:
        raise GraphError(f"unknown graph kind {kind!r}")
    return Graph.from_edges(n, edges, meta=meta)


def _random_graph(kind, n, seed, d, p, min_gap, meta) -> Graph:
    rng = np.random.default_rng(seed)
    regular = kind in ("random-regular", "rreg")
    if regular:
        if d is None or d < 1 or d >= n or (n * d) % 2:
            raise GraphError(f"infeasible random-regular parameters d={d}, n={n}")
    elif p is None or not 0 < p <= 1:
        raise GraphError("erdos-renyi needs 0 < p <= 1")
    for attempt in range(1, MAX_RETRIES + 1):
        if regular:
            h = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
            edges = list(h.edges())
        else:
            upper = np.triu(rng.random((n, n)) < p, 1)
            edges = list(zip(*np.nonzero(upper)))
        g = Graph.from_edges(n, edges, meta={**meta, "d": d, "p": p, "seed": seed})
        if not g.is_connected():
            continue
        if min_gap is not None and spectral_profile(g, "bound").alpha < min_gap:
            continue
        g.meta["attempts"] = attempt
        return g
    raise GraphError(f"no acceptable {kind} graph after {MAX_RETRIES} attempts")


def parse_graph_spec(spec: str) -> Graph:
    """'complete:1024', 'rreg:8:512:7', 'er:16:0.3:2', 'petersen', or an edge-list path."""
    if os.path.exists(spec):
        g = read_edge_list(spec)
        g.meta["spec"] = spec
        return g
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "petersen":
            g = petersen()
        elif kind in ("rreg", "random-regular"):
            seed = int(parts[3]) if len(parts) > 3 else 0
            g = generate("random-regular", int(parts[2]), seed=seed, d=int(parts[1]))
        elif kind in ("er", "erdos-renyi"):
            seed = int(parts[3]) if len(parts) > 3 else 0
            g = generate("erdos-renyi", int(parts[1]), seed=seed, p=float(parts[2]))
        else:
            g = generate(kind, int(parts[1]))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"cannot parse graph spec {spec!r}") from exc
    g.meta["spec"] = spec
    return g


def read_edge_list(path: str) -> Graph:
    edges = []
    top = -1
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            u, v = map(int, line.split()[:2])
            edges.append((u, v))
            top = max(top, u, v)
    return Graph.from_edges(top + 1, edges)


def write_edge_list(g: Graph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={g.n} m={g.m}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def ordering_to_json(g: Graph) -> str:
    return json.dumps({str(u): nb for u, nb in enumerate(g.lists)})
