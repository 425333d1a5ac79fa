"""Experiment files, seeded Monte Carlo orchestration and summaries."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..graphs import Graph, parse_graph_spec, spectral_profile
from ..protocols import (HashingConfig, Protocol2Config, Protocol5Config, run_fully_random,
                         run_protocol2, run_protocol3, run_protocol4, run_protocol5, run_pull,
                         run_push_pull)
from ..protocols.hashing import MAX_ID_BITS
from ..rng import trial_rng

CSV_COLUMNS = ("trial", "rounds", "bits", "success")
PROTOCOLS = ("fully-random", "pull", "push-pull", "protocol2", "protocol3", "protocol4", "protocol5")


@dataclass
class Experiment:
    graph: str
    protocol: dict
    trials: int = 1
    seed: int = 0
    source: int = 0
    outputs: dict = field(default_factory=dict)  # {"csv": path, "json": path}
    thresholds: dict = field(default_factory=dict)  # e.g. {"max_rounds": 40, "min_success_rate": 0.99}

    def __post_init__(self):
        if isinstance(self.protocol, str):
            self.protocol = {"name": self.protocol}
        if self.protocol.get("name") not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol.get('name')!r}")
        if self.trials < 1:
            raise ValueError("trials must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Experiment":
        known = {"graph", "protocol", "trials", "seed", "source", "outputs", "thresholds"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown experiment fields {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str) -> "Experiment":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def default_rounds(g: Graph, name: str) -> int:
    """Round horizon used when the experiment leaves T unset."""
    alpha = spectral_profile(g, "bound").alpha
    logn = math.log2(max(g.n, 2))
    if name == "protocol5":
        beta = g.Delta / g.delta
        return math.ceil(16 * beta**2 * math.log(max(g.n, 2)) / alpha)
    T = 2 * math.ceil(2 * logn / alpha)
    if name in ("protocol3", "protocol4"):
        T = min(T, MAX_ID_BITS)
    return T


def make_runner(g: Graph, proto: dict):
    """(run(rng, source) -> SpreadTrace, description) with generators built once."""
    params = dict(proto)
    name = params.pop("name")
    T = params.pop("T", None)
    if name in ("fully-random", "pull", "push-pull"):
        fn = {"fully-random": run_fully_random, "pull": run_pull, "push-pull": run_push_pull}[name]
        if params:
            raise ValueError(f"{name} takes no parameters besides T")
        return (lambda rng, s: fn(g, s, T, rng)), {"protocol": name, "T": T}
    T = T if T is not None else default_rounds(g, name)
    if name == "protocol2":
        cfg = Protocol2Config(T, **params)
        gens = cfg.generators(g)
        return (lambda rng, s: run_protocol2(g, s, cfg, rng, gens)), cfg.describe(g)
    if name in ("protocol3", "protocol4"):
        cfg = HashingConfig.derive(name, g, T, **params)
        gen = cfg.generator()
        fn = run_protocol3 if name == "protocol3" else run_protocol4
        return (lambda rng, s: fn(g, s, cfg, rng, gen)), cfg.describe()
    cfg = Protocol5Config(T, **params)
    gens = cfg.generators(g)
    return (lambda rng, s: run_protocol5(g, s, cfg, rng, generators=gens).trace), cfg.describe(g)


@dataclass
class Summary:
    rows: list[dict]
    aggregates: dict
    config: dict = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)
    verdict: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"rows": self.rows, "aggregates": self.aggregates, "config": self.config,
                "errors": self.errors, "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def aggregate(rows: list[dict]) -> dict:
    """Mean, median and p99 of rounds over successful trials, plus success rate and bits."""
    done = np.array([r["rounds"] for r in rows if r["success"]], dtype=float)
    bits = np.array([r["bits"] for r in rows], dtype=float)
    out = {"trials": len(rows), "successes": int(len(done)),
           "success_rate": len(done) / len(rows) if rows else 0.0,
           "mean_bits": float(bits.mean()) if len(bits) else 0.0,
           "max_bits": int(bits.max()) if len(bits) else 0}
    if len(done):
        out.update(mean_rounds=float(done.mean()), median_rounds=float(np.median(done)),
                   p99_rounds=float(np.percentile(done, 99)), max_rounds=int(done.max()))
    else:
        out.update(mean_rounds=None, median_rounds=None, p99_rounds=None, max_rounds=None)
    return out


def check_thresholds(agg: dict, thresholds: dict) -> dict:
    checks = {}
    if "max_rounds" in thresholds:
        checks["max_rounds"] = agg["max_rounds"] is not None and agg["max_rounds"] <= thresholds["max_rounds"]
    if "min_success_rate" in thresholds:
        checks["min_success_rate"] = agg["success_rate"] >= thresholds["min_success_rate"]
    if "max_mean_rounds" in thresholds:
        checks["max_mean_rounds"] = (agg["mean_rounds"] is not None
                                     and agg["mean_rounds"] <= thresholds["max_mean_rounds"])
    return {"checks": checks, "passed": all(checks.values())}


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("RUMORLAB_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("thread count must be positive")
    return threads


def run_trials(fn, trials: int, threads: int = 1) -> list:
    """fn(trial) for every trial, merged in trial order regardless of scheduling."""
    if threads == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def run_experiment(e: Experiment, threads: int | None = None, graph: Graph | None = None,
                   write: bool = True) -> Summary:
    g = graph if graph is not None else parse_graph_spec(e.graph)
    if not 0 <= e.source < g.n:
        raise ValueError("source outside the graph")
    run, desc = make_runner(g, e.protocol)

    def one(trial):
        try:
            trace = run(trial_rng(e.seed, trial), e.source)
            return trace.summary_row(trial), None
        except (ValueError, OverflowError, ArithmeticError) as exc:
            row = {"trial": trial, "rounds": -1, "bits": 0, "success": 0}
            return row, {"trial": trial, "error": f"{type(exc).__name__}: {exc}"}

    results = run_trials(one, e.trials, resolve_threads(threads))
    rows = [r for r, _ in results]
    errors = [err for _, err in results if err is not None]
    agg = aggregate(rows)
    summary = Summary(rows, agg, {"experiment": e.to_dict(), "protocol": desc, "n": g.n}, errors,
                      check_thresholds(agg, e.thresholds))
    if write:
        write_summary(summary, e.outputs)
    return summary


def write_summary(summary: Summary, outputs: dict) -> None:
    if outputs.get("csv"):
        with open(outputs["csv"], "w") as fh:
            fh.write(summary.to_csv())
    if outputs.get("json"):
        with open(outputs["json"], "w") as fh:
            fh.write(summary.to_json())
