"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 infeasible request.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from ..adversary import (Infeasible, TabulatedProtocol, build_pull_adversary, build_push_adversary,
                         build_pushpull_adversary, verify_adversary)
from ..graphs import GraphError, parse_graph_spec, spectral_profile, write_edge_list
from ..markov import PreconditionError
from . import suites
from .experiment import Experiment, resolve_threads, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=None, help="defaults to $RUMORLAB_THREADS or 1")

    p = _Parser(prog="rumorlab", description="Rumor spreading with few random bits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="run an experiment")
    sim.add_argument("experiment", nargs="?", help="experiment JSON file")
    sim.add_argument("--protocol", help="protocol name when no experiment file is given")
    sim.add_argument("--graph", help="graph spec or edge-list path")
    sim.add_argument("--source", type=int, default=0)
    sim.add_argument("--T", type=int, default=None, help="round horizon")
    sim.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="extra protocol parameter (JSON value)")

    an = sub.add_parser("analyze", parents=[common], help="spectral and conductance profile")
    an.add_argument("--graph", required=True)
    an.add_argument("--conductance", choices=("auto", "exact", "bound"), default="auto")

    ver = sub.add_parser("verify", parents=[common], help="run a lemma-check suite")
    ver.add_argument("suite", choices=suites.SUITES)
    ver.add_argument("--graph", default="petersen")
    ver.add_argument("--gamma", default="auto")
    ver.add_argument("--kmax", type=int, default=200)
    ver.add_argument("--k", type=int, default=4, help="walk length for walk-moments")
    ver.add_argument("--q", type=int, default=7)
    ver.add_argument("--degree-bound", type=int, default=1)
    ver.add_argument("--K", type=int, default=3)

    adv = sub.add_parser("adversary", parents=[common], help="build and verify a lower-bound ordering")
    adv.add_argument("--graph", required=True)
    adv.add_argument("--mode", choices=("push", "pull", "push-pull"), default="push")
    adv.add_argument("--l", type=int, default=1, help="seed bits of the tabulated protocol")
    adv.add_argument("--T", type=int, default=1)
    adv.add_argument("--source", type=int, default=0)
    adv.add_argument("--table", help="JSON file with push/pull tables; random tables otherwise")

    gen = sub.add_parser("gen", parents=[common], help="emit a graph as an edge list")
    gen.add_argument("--graph", required=True, help="graph spec, e.g. rreg:8:512:3")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise UsageError(f"--param expects KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_simulate(a) -> int:
    if a.experiment:
        e = Experiment.load(a.experiment)
        if a.trials is not None:
            e.trials = a.trials
    else:
        if not a.protocol or not a.graph:
            raise UsageError("simulate needs an experiment file or --protocol and --graph")
        proto = {"name": a.protocol, **dict(_param(x) for x in a.param)}
        if a.T is not None:
            proto["T"] = a.T
        e = Experiment(a.graph, proto, trials=a.trials or 1, seed=a.seed, source=a.source)
    summary = run_experiment(e, threads=resolve_threads(a.threads))
    _emit(summary.to_csv() if a.format == "csv" else summary.to_json(), a.out)
    if a.out:
        print(json.dumps(summary.aggregates, sort_keys=True))
    if summary.errors:
        print(f"{len(summary.errors)} trial(s) failed; see the JSON summary", file=sys.stderr)
    return EXIT_OK if summary.verdict.get("passed", True) else EXIT_VERIFY


def cmd_analyze(a) -> int:
    g = parse_graph_spec(a.graph)
    prof = spectral_profile(g, a.conductance).to_dict()
    prof.update(n=g.n, m=g.m, Delta=g.Delta, delta=g.delta)
    if a.format == "json":
        _emit(json.dumps(prof, sort_keys=True, indent=2) + "\n", a.out)
    else:
        _emit(_rows_csv(sorted(prof), [prof]), a.out)
    return EXIT_OK


def cmd_verify(a) -> int:
    rng = np.random.default_rng(a.seed)
    if a.suite == "pairwise":
        rep = suites.verify_pairwise()
    elif a.suite == "dispersion":
        rep = suites.verify_dispersion(a.q, a.degree_bound, a.K, rng=rng)
    else:
        g = parse_graph_spec(a.graph)
        if a.suite == "mixing":
            rep = suites.verify_mixing(g, a.gamma, a.kmax)
        elif a.suite == "coupling":
            rep = suites.verify_coupling(g, a.gamma)
        else:
            rep = suites.verify_walk_moments(g, a.k, a.gamma, a.trials or 100_000, rng)
    if a.format == "json":
        _emit(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n", a.out)
    else:
        _emit(_rows_csv(rep.columns, rep.rows), a.out)
    print(f"{rep.name}: {'PASS' if rep.passed else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def _load_tables(path: str, l: int, T: int) -> TabulatedProtocol:
    with open(path) as fh:
        d = json.load(fh)
    tabs = {k: np.asarray(d[k], dtype=np.int64) for k in ("push", "pull") if k in d}
    return TabulatedProtocol(int(d.get("l", l)), int(d.get("T", T)), **tabs)


def cmd_adversary(a) -> int:
    g = parse_graph_spec(a.graph)
    rng = np.random.default_rng(a.seed)
    if a.table:
        P = _load_tables(a.table, a.l, a.T)
    else:
        P = TabulatedProtocol.random(a.l, a.T, g, rng, a.mode)
    try:
        if a.mode == "push":
            res = build_push_adversary(g, a.source, P)
        elif a.mode == "pull":
            res = build_pull_adversary(g, a.source, P)
        else:
            res = build_pushpull_adversary(g, a.source, P, rng)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    check = verify_adversary(res.ordering, P, a.source, res.cut)
    _emit(json.dumps({**res.to_dict(), "verification": check}, sort_keys=True, indent=2) + "\n", a.out)
    return EXIT_OK if check["defeated"] else EXIT_VERIFY


def cmd_gen(a) -> int:
    g = parse_graph_spec(a.graph)
    if a.out:
        write_edge_list(g, a.out)
    else:
        sys.stdout.write(f"# n={g.n} m={g.m}\n" + "".join(f"{u} {v}\n" for u, v in g.edges))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "verify": cmd_verify,
            "adversary": cmd_adversary, "gen": cmd_gen}


def main(argv=None) -> int:
    try:
        a = _parser().parse_args(argv)
        return COMMANDS[a.command](a)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
