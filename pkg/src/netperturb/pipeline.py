"""End-to-end run: generate, perturb, measure, normalize, compare, cluster, classify, export.

All randomness is fixed by the master seed in the config, and files are
written only after every cell has been aggregated, so two runs with the same
config produce byte-identical output trees whatever the worker count.

Output files (``config_hash`` is the first 16 hex digits of the SHA-256 of
the resolved config; the full digest is in ``meta.json``):

``raw.csv``
    experiment, model, measurement, grid_value, realization, value, flags,
    grid_index, config_hash, master_seed
``curves.csv``
    experiment, model, measurement, grid_index, grid_value, raw_mean, c,
    config_hash, master_seed
``stats.csv``
    experiment, model, measurement, psi, psi_degenerate, pearson,
    pearson_degenerate, spearman, magnitude, mu, sigma, label, config_hash,
    master_seed
``membership.csv``
    measurement, one label column per ``MODEL/EXPERIMENT`` cell, config_hash,
    master_seed
``simnet.json`` / ``simnet.dot``
    one similarity network per cell
``dendrogram.nwk`` / ``dendrogram.json``
    one dendrogram per cell; Newick trees are prefixed by a ``[cell ...]`` comment
``meta.json``
    resolved config, hashes, realized seeds and degeneracy counts
"""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .coincidence import SimilarityNetwork, build_similarity_network
from .config import RunConfig
from .errors import DegeneracyError, NetPerturbError, NetPerturbIOError, StageError
from .experiments import SignatureMatrix, membership_table, run_experiment
from .hcluster import Dendrogram, agglomerate, dendrogram_to_newick
from .measurements import MEASUREMENTS
from .signals import ChangeCurve, classify_abc, curve_stats, mean_trajectory

STAGES = ("generate", "perturb", "measure", "normalize", "similarity", "cluster",
          "classify", "export")
OUTPUT_FILES = ("raw.csv", "curves.csv", "stats.csv", "membership.csv", "simnet.json",
                "simnet.dot", "dendrogram.nwk", "dendrogram.json", "meta.json")


@dataclass
class CellResult:
    model: str
    experiment: str
    sig: SignatureMatrix
    raw_means: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    network: SimilarityNetwork | None = None
    dendrogram: Dendrogram | None = None

    @property
    def key(self) -> str:
        return f"{self.model}/{self.experiment}"


@dataclass
class PipelineRun:
    config: RunConfig
    out_dir: str | None
    cells: dict  # (model, experiment) -> CellResult

    @property
    def labels(self) -> dict:
        return {k: c.labels for k, c in self.cells.items()}


def _fail(stage, cell, measurement, exc):
    if isinstance(exc, StageError):
        return exc
    return StageError(stage, (cell.model, cell.experiment, measurement), exc)


def analyze_signature(sig: SignatureMatrix, cfg: RunConfig) -> CellResult:
    """Normalize, compare, cluster and classify one cell's trajectories."""
    cell = CellResult(sig.model, sig.experiment, sig)
    for m in MEASUREMENTS:
        try:
            curve, stats = curve_stats(sig, m, cfg.baseline)
            cell.curves[m], cell.stats[m] = curve, stats
            cell.raw_means[m] = mean_trajectory(sig, m)
        except (ValueError, ArithmeticError, NetPerturbError) as exc:
            raise _fail("normalize", cell, m, exc) from exc
    try:
        curves = [cell.curves[m] for m in MEASUREMENTS]
        if cfg.baseline == "initial":
            # changes from the start can be negative; compare their magnitudes
            curves = [ChangeCurve(c.measurement, c.grid, np.abs(c.values), c.sigma, c.minimum,
                                  c.mean, c.degenerate) for c in curves]
        raw_areas = None
        if cfg.area == "raw":
            raw_areas = [np.abs(cell.raw_means[m] - cell.raw_means[m][0]) for m in MEASUREMENTS]
        cell.network = build_similarity_network(curves, None, cfg.coincidence_params, raw_areas)
    except (ValueError, ArithmeticError) as exc:
        raise _fail("similarity", cell, None, exc) from exc
    try:
        cell.dendrogram = agglomerate(cell.network.weights, MEASUREMENTS, cfg.linkage)
    except (ValueError, ArithmeticError) as exc:
        raise _fail("cluster", cell, None, exc) from exc
    th = cfg.thresholds
    for m in MEASUREMENTS:
        try:
            cell.labels[m] = classify_abc(cell.curves[m], cell.stats[m], th)
        except (ValueError, ArithmeticError) as exc:
            raise _fail("classify", cell, m, exc) from exc
    cell.network.labels = dict(cell.labels)
    return cell


def compute(cfg: RunConfig, workers: int | None = None) -> PipelineRun:
    """Run every configured cell without writing anything."""
    cells = {}
    for model, experiment in cfg.cells():
        ecfg = cfg.experiment_config(model, experiment)
        try:
            sig = run_experiment(ecfg, workers)
        except StageError:
            raise
        except (ValueError, ArithmeticError, NetPerturbError) as exc:
            stage = "generate" if experiment == "SIZE" else "perturb"
            raise StageError(stage, (model, experiment), exc) from exc
        cells[(model, experiment)] = analyze_signature(sig, cfg)
    return PipelineRun(cfg, None, cells)


def _num(x) -> str:
    return repr(float(x))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _seeds_json(sig: SignatureMatrix) -> dict:
    if "cells" in sig.seeds:
        n_grid, q = sig.values.shape[1], sig.values.shape[2]
        return {"per_cell": [[sig.seeds["cells"][(i, r)] for r in range(q)]
                             for i in range(n_grid)]}
    return {"initial": list(sig.seeds["initial"]), "realizations": list(sig.seeds["realizations"])}


def render_outputs(run: PipelineRun) -> dict[str, str]:
    """Text of every output file, keyed by file name."""
    cfg = run.config
    full_hash = cfg.config_hash()
    h, seed = full_hash[:16], str(cfg.seed)
    cells = [run.cells[k] for k in cfg.cells() if k in run.cells]
    out = {}

    rows = []
    for c in cells:
        sig = c.sig
        for k, m in enumerate(MEASUREMENTS):
            for i, gv in enumerate(sig.grid):
                g = _num(gv)
                for r in range(sig.num_realizations):
                    rows.append([c.experiment, c.model, m, g, r, _num(sig.values[k, i, r]),
                                 sig.flags[k, i, r], i, h, seed])
    out["raw.csv"] = _csv_text(["experiment", "model", "measurement", "grid_value", "realization",
                                "value", "flags", "grid_index", "config_hash", "master_seed"], rows)

    rows = []
    for c in cells:
        for m in MEASUREMENTS:
            cv, raw = c.curves[m], c.raw_means[m]
            for i, gv in enumerate(cv.grid):
                rows.append([c.experiment, c.model, m, i, _num(gv), _num(raw[i]),
                             _num(cv.values[i]), h, seed])
    out["curves.csv"] = _csv_text(["experiment", "model", "measurement", "grid_index",
                                   "grid_value", "raw_mean", "c", "config_hash", "master_seed"],
                                  rows)

    rows = []
    for c in cells:
        for m in MEASUREMENTS:
            st, cv = c.stats[m], c.curves[m]
            rows.append([c.experiment, c.model, m, _num(st.psi), int(st.psi_degenerate),
                         _num(st.pearson), int(st.pearson_degenerate), _num(st.spearman),
                         _num(st.magnitude), _num(cv.mean), _num(cv.sigma), c.labels[m], h, seed])
    out["stats.csv"] = _csv_text(["experiment", "model", "measurement", "psi", "psi_degenerate",
                                  "pearson", "pearson_degenerate", "spearman", "magnitude", "mu",
                                  "sigma", "label", "config_hash", "master_seed"], rows)

    keys = [c.key for c in cells]
    rows = [[m] + [c.labels[m] for c in cells] + [h, seed] for m in MEASUREMENTS]
    out["membership.csv"] = _csv_text(["measurement"] + keys + ["config_hash", "master_seed"],
                                      rows)

    prov = {"config_hash": full_hash, "master_seed": cfg.seed}
    out["simnet.json"] = json.dumps(
        {**prov, "cells": {c.key: c.network.to_dict() for c in cells}}, indent=1) + "\n"
    dot = [f"// config_hash={full_hash} master_seed={seed}\n"]
    dot += [c.network.to_dot(name=c.key) for c in cells]
    out["simnet.dot"] = "".join(dot)

    out["dendrogram.nwk"] = "".join(
        f"[cell={c.key} config_hash={h} master_seed={seed}]{dendrogram_to_newick(c.dendrogram)}\n"
        for c in cells)
    out["dendrogram.json"] = json.dumps(
        {**prov, "linkage": cfg.linkage, "cells": {c.key: c.dendrogram.to_dict() for c in cells}},
        indent=1) + "\n"

    meta = {
        **prov,
        "config": cfg.to_dict(),
        "stages": list(STAGES),
        "outputs": list(OUTPUT_FILES),
        "cells": {},
    }
    for c in cells:
        sig = c.sig
        degenerate = sig.degenerate
        meta["cells"][c.key] = {
            "grid": [float(x) for x in sig.grid],
            "steps": [int(x) for x in sig.steps] if sig.steps is not None else None,
            "realizations": sig.num_realizations,
            "truncated": bool(sig.truncated),
            "seeds": _seeds_json(sig),
            "degenerate_cells": {m: int(degenerate[k].sum())
                                 for k, m in enumerate(MEASUREMENTS) if degenerate[k].any()},
        }
    out["meta.json"] = json.dumps(meta, indent=1) + "\n"
    return out


def write_outputs(run: PipelineRun, out_dir) -> list[str]:
    try:
        texts = render_outputs(run)
    except (ValueError, ArithmeticError) as exc:
        raise StageError("export", (), exc) from exc
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        for name in OUTPUT_FILES:
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(texts[name])
            paths.append(path)
    except OSError as exc:
        raise NetPerturbIOError(f"cannot write outputs to {out_dir}: {exc}") from exc
    return paths


def run_pipeline(config: RunConfig, out_dir=None, workers: int | None = None) -> PipelineRun:
    """Run all cells of ``config``; write the output tree when ``out_dir`` is given."""
    run = compute(config, workers)
    if out_dir is not None:
        write_outputs(run, out_dir)
        run.out_dir = str(out_dir)
    return run


def full_membership(run: PipelineRun):
    """The 14 x 9 membership table; raises if any cell is missing."""
    return membership_table(run.labels)


def read_curves_csv(path) -> dict:
    """Curves from ``curves.csv``: ``{(model, experiment): [ChangeCurve, ...]}``."""
    acc = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["model"], row["experiment"])
            acc.setdefault(key, {}).setdefault(row["measurement"], []).append(
                (int(row["grid_index"]), float(row["grid_value"]), float(row["c"])))
    out = {}
    for key, per_m in acc.items():
        curves = []
        for m in MEASUREMENTS:
            if m not in per_m:
                raise DegeneracyError(f"{path}: {key[0]}/{key[1]} lacks measurement {m}")
            pts = sorted(per_m[m])
            grid = np.array([p[1] for p in pts])
            vals = np.array([p[2] for p in pts])
            curves.append(ChangeCurve(m, grid, vals, float("nan"), 0.0, float("nan"),
                                      bool(np.all(vals == 0))))
        out[key] = curves
    return out


def read_labels_csv(path) -> dict:
    """Labels from ``stats.csv``: ``{(model, experiment): {measurement: label}}``."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault((row["model"], row["experiment"]), {})[row["measurement"]] = row["label"]
    return out
