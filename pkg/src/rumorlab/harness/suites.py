"""Lemma-check suites behind `rumorlab verify`; each returns a measured-vs-bound table."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..expander_maps import UnbalancedExpander, dispersion_check, expansion_certify
from ..gf import is_prime
from ..graphs import Graph
from ..markov import gamma_limit, mixing_check, stationary_check, walk_moment_chains
from ..pseudorandom import PairwiseGen, all_outputs, independence_defect, modulo_deviation, product_table
from ..walks import pair_walk_moments, walk_endpoints


@dataclass
class VerifyReport:
    name: str
    columns: tuple[str, ...]
    rows: list[dict]
    passed: bool
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"suite": self.name, "columns": list(self.columns), "rows": self.rows,
                "passed": self.passed, "info": self.info}


def _gamma(g: Graph, gamma) -> float:
    return gamma_limit(g) if gamma in (None, "auto") else float(gamma)


def verify_mixing(g: Graph, gamma="auto", k_max: int = 200) -> VerifyReport:
    gam = _gamma(g, gamma)
    rows = [{"k": r.k, "measured": r.measured, "bound": r.bound} for r in mixing_check(g, gam, k_max)]
    ok = all(r["measured"] <= r["bound"] for r in rows)
    return VerifyReport("mixing", ("k", "measured", "bound"), rows, ok, {"gamma": gam})


def verify_coupling(g: Graph, gamma="auto") -> VerifyReport:
    gam = _gamma(g, gamma)
    dist, bound = stationary_check(g, gam)
    row = {"gamma": gam, "distance": dist, "bound": bound}
    return VerifyReport("coupling", ("gamma", "distance", "bound"), [row], dist <= bound + 1e-9)


def verify_pairwise(qs=(3, 5, 7), ms=(8, 11), targets=(3, 5)) -> VerifyReport:
    """Exact independence of a*i+b, then the modular-reduction deviation against 2/m."""
    rows = []
    for q in qs:
        for d in range(2, q + 1):
            defect = independence_defect(PairwiseGen(q, d))
            rows.append({"check": "independence", "q": q, "m": q, "d": d, "targets": "",
                         "measured": float(defect), "bound": 0.0})
    for m in ms:
        tables = {"product": product_table(m, 2)}
        if is_prime(m):
            tables["affine"] = all_outputs(PairwiseGen(m, m))
        else:
            tables["truncated-11"] = all_outputs(PairwiseGen(11, 11)) % m
        for label, table in tables.items():
            d = table.shape[1]
            tg = [targets[i % len(targets)] for i in range(d)]
            dev = modulo_deviation(table, tg)
            rows.append({"check": f"modulo-{label}", "q": "", "m": m, "d": d,
                         "targets": "/".join(map(str, sorted(set(tg)))),
                         "measured": float(dev), "bound": 2 / m})
    ok = all(r["measured"] <= r["bound"] for r in rows)
    return VerifyReport("pairwise", ("check", "q", "m", "d", "targets", "measured", "bound"), rows, ok)


def verify_dispersion(q: int = 7, degree_bound: int = 1, K: int = 3, sets: int = 200,
                      rng: np.random.Generator | None = None) -> VerifyReport:
    """Certify eps exhaustively, then check every tested S keeps (1 - sqrt eps)|S| images."""
    rng = rng or np.random.default_rng(0)
    e = UnbalancedExpander(q, degree_bound)
    cert = expansion_certify(e, K)
    rows = []
    for i in range(sets):
        S = rng.choice(e.N, size=K, replace=False)
        frac = dispersion_check(e, S, cert.epsilon)
        rows.append({"set": i, "S": " ".join(map(str, sorted(S.tolist()))), "fraction": frac,
                     "bound": 1 - math.sqrt(cert.epsilon)})
    ok = all(r["fraction"] >= r["bound"] - 1e-12 for r in rows)
    return VerifyReport("dispersion", ("set", "S", "fraction", "bound"), rows, ok,
                        {"certificate": cert.to_dict(), "expander": e.describe()})


def verify_walk_moments(g: Graph, k: int = 4, gamma="auto", trials: int = 100_000,
                        rng: np.random.Generator | None = None, tol: float = 0.01) -> VerifyReport:
    """Monte Carlo walk endpoints against M1..M4, per cell within max(3 sigma, tol)."""
    rng = rng or np.random.default_rng(0)
    gam = _gamma(g, gamma)
    chains = walk_moment_chains(g, gam)
    n = g.n
    rows = []
    for s in range(n):
        for name, chain, direction in (("M1", chains[0], "forward"), ("M3", chains[2], "reversed")):
            emp = walk_endpoints(g, s, k, gam, trials, rng, direction)
            exact = chain.power_row(s, k)
            rows.append(_moment_row(name, (s,), emp, exact, trials, tol))
    for s1 in range(n):
        for s2 in range(n):
            for name, chain, direction in (("M2", chains[1], "forward"), ("M4", chains[3], "reversed")):
                emp = pair_walk_moments(g, (s1, s2), k, gam, trials, rng, direction).ravel()
                exact = chain.power_row(s1 * n + s2, k)
                rows.append(_moment_row(name, (s1, s2), emp, exact, trials, tol))
    ok = all(r["max_excess"] <= 0 for r in rows)
    return VerifyReport("walk-moments", ("chain", "start", "max_abs_dev", "max_excess"), rows, ok,
                        {"gamma": gam, "k": k, "trials": trials})


def _moment_row(name, start, emp, exact, trials, tol) -> dict:
    sigma = np.sqrt(exact * (1 - exact) / trials)
    allowed = np.maximum(3 * sigma, tol)
    dev = np.abs(emp - exact)
    return {"chain": name, "start": "-".join(map(str, start)), "max_abs_dev": float(dev.max()),
            "max_excess": float((dev - allowed).max())}


SUITES = ("mixing", "pairwise", "dispersion", "coupling", "walk-moments")
