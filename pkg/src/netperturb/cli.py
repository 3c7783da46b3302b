"""Command line entry point: ``netperturb {gen,measure,run,simnet,cluster,report}``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 fatal
degeneracy, 4 file input/output failure, 1 anything else. The worker count
for ``run`` defaults to the ``NETPERTURB_WORKERS`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .coincidence import build_similarity_network
from .config import load_config
from .errors import ConfigError, DegeneracyError, NetPerturbError, NetPerturbIOError
from .experiments import default_workers
from .generators import MODELS, generate
from .graph import read_edgelist, write_edgelist
from .hcluster import LINKAGES, Dendrogram, agglomerate, dendrogram_to_newick
from .measurements import MEASUREMENTS, measure_all
from .pipeline import read_curves_csv, read_labels_csv, run_pipeline


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _write_text(path, text):
    try:
        if path in (None, "-"):
            sys.stdout.write(text)
            return
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot write {path}: {exc}") from exc


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot read {path}: {exc}") from exc


def cmd_gen(args):
    model = args.model.upper()
    if model not in MODELS:
        raise ConfigError(f"unknown model {args.model!r}; choose from {MODELS}")
    try:
        g = generate(model, args.n, args.k, args.seed, args.epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        write_edgelist(g, args.out)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot write {args.out}: {exc}") from exc
    print(f"{model}: N={g.n} E={g.num_edges} <k>={2 * g.num_edges / g.n:.6g}", file=sys.stderr)


def cmd_measure(args):
    try:
        g = read_edgelist(args.input)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot read {args.input}: {exc}") from exc
    except ValueError as exc:
        raise NetPerturbIOError(f"malformed edge list {args.input}: {exc}") from exc
    try:
        reports = measure_all(g, ring_only=args.ring_only)
    except ValueError as exc:
        raise DegeneracyError(str(exc)) from exc
    out = {m: reports[m].value for m in MEASUREMENTS}
    out["flags"] = {m: reports[m].flag for m in MEASUREMENTS if reports[m].flag}
    _write_text(args.out, json.dumps(out, indent=1, allow_nan=True) + "\n")


def cmd_run(args):
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot read {args.config}: {exc}") from exc
    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    run = run_pipeline(cfg, args.out, workers)
    print(f"wrote {len(run.cells)} cell(s) to {args.out}", file=sys.stderr)


def cmd_simnet(args):
    try:
        curves = read_curves_csv(args.curves)
        labels = read_labels_csv(args.stats) if args.stats else {}
    except OSError as exc:
        raise NetPerturbIOError(str(exc)) from exc
    nets = {f"{m}/{e}": build_similarity_network(cs, labels.get((m, e)))
            for (m, e), cs in sorted(curves.items())}
    if args.out and args.out.endswith(".dot"):
        text = "".join(n.to_dot(name=k, threshold=args.threshold) for k, n in nets.items())
    else:
        text = json.dumps({"cells": {k: n.to_dict(args.threshold) for k, n in nets.items()}},
                          indent=1) + "\n"
    _write_text(args.out, text)


def _weights_from_simnet(cell: dict):
    names = [n["id"] for n in cell["nodes"]]
    idx = {m: i for i, m in enumerate(names)}
    sim = np.eye(len(names))
    for e in cell["edges"]:
        i, j = idx[e["source"]], idx[e["target"]]
        sim[i, j] = sim[j, i] = e["weight"]
    return names, sim


def cmd_cluster(args):
    data = _read_json(args.simnet)
    dendros = {}
    for key, cell in data["cells"].items():
        names, sim = _weights_from_simnet(cell)
        dendros[key] = agglomerate(sim, names, args.linkage)
    if args.out and args.out.endswith(".json"):
        text = json.dumps({"linkage": args.linkage,
                           "cells": {k: d.to_dict() for k, d in dendros.items()}}, indent=1) + "\n"
    else:
        text = "".join(f"[cell={k}]{dendrogram_to_newick(d)}\n" for k, d in dendros.items())
    _write_text(args.out, text)


def _table(rows):
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
                     for r in rows) + "\n"


def cmd_report(args):
    try:
        labels = read_labels_csv(os.path.join(args.results, "stats.csv"))
    except OSError as exc:
        raise NetPerturbIOError(str(exc)) from exc
    cells = list(labels)
    rows = [["measurement"] + [f"{m}/{e}" for m, e in cells]]
    rows += [[x] + [labels[c].get(x, "?") for c in cells] for x in MEASUREMENTS]
    text = _table(rows)
    meta_path = os.path.join(args.results, "meta.json")
    if os.path.exists(meta_path):
        meta = _read_json(meta_path)
        text += f"\nmaster seed {meta['master_seed']}, config {meta['config_hash'][:16]}\n"
        for key, info in meta["cells"].items():
            degen = ", ".join(f"{m} x{n}" for m, n in info["degenerate_cells"].items()) or "none"
            trunc = " (truncated)" if info["truncated"] else ""
            text += f"{key}: {len(info['grid'])} grid points{trunc}; degenerate cells: {degen}\n"
    _write_text(args.out, text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netperturb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate one ER, BA or GEO network")
    g.add_argument("--model", required=True)
    g.add_argument("--n", type=int, required=True, help="node count (a perfect square for GEO)")
    g.add_argument("--k", type=float, default=5.7, help="target average degree (ER, BA)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--epsilon", type=float, default=0.001, help="GEO jitter")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("measure", help="all fourteen measurements of an edge list")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--out", default="-")
    m.add_argument("--ring-only", action="store_true",
                   help="accessibility restricted to the exact-distance ring")
    m.set_defaults(func=cmd_measure)

    r = sub.add_parser("run", help="run the full pipeline from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--workers", type=int, default=None)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("simnet", help="similarity networks from curves.csv")
    s.add_argument("--curves", required=True)
    s.add_argument("--stats", default=None, help="stats.csv supplying node labels")
    s.add_argument("--threshold", type=float, default=0.0)
    s.add_argument("--out", default="-", help="*.json or *.dot")
    s.set_defaults(func=cmd_simnet)

    c = sub.add_parser("cluster", help="dendrograms from a simnet JSON file")
    c.add_argument("--simnet", required=True)
    c.add_argument("--linkage", choices=LINKAGES, default="average")
    c.add_argument("--out", default="-", help="*.nwk or *.json")
    c.set_defaults(func=cmd_cluster)

    rep = sub.add_parser("report", help="membership table and run summary")
    rep.add_argument("results")
    rep.add_argument("--out", default="-")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return exc.exit_code
    except NetPerturbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NetPerturbIOError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
