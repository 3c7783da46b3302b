"""Perturbation protocols: network size, edge removal and edge rewiring.

Each protocol produces a :class:`SignatureMatrix` holding the raw network
value of every measurement at every point of the free-variable grid, for
every realization. Realizations are independent tasks; their seeds are
derived from the master seed and the task coordinates only, so results do
not depend on how tasks are scheduled.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NetPerturbError, StageError
from .generators import DEFAULT_EPSILON, MODELS, generate, lattice_side
from .graph import Graph
from .measurements import MEASUREMENTS, measure_all

EXPERIMENTS = ("SIZE", "REMOVAL", "REWIRING")
DEFAULT_SIZES = (16, 25, 36, 49, 64, 81, 100)
REWIRING_MODES = ("uniform", "swap")
INITIAL_MODES = ("shared", "fresh")


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed for the task at ``keys``.

    ``numpy.random.SeedSequence(master, spawn_key=keys)`` hashes the master
    entropy together with the coordinates; the first 64-bit word of its state
    is the task seed.
    """
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: str
    sizes: tuple = DEFAULT_SIZES
    n: int = 100
    avg_degree: float = 5.7
    steps: int = 100
    realizations: int = 50
    seed: int = 0
    stride: int = 1
    epsilon: float = DEFAULT_EPSILON
    rewiring: str = "uniform"
    initial: str | None = None
    ring_only: bool = False

    @property
    def initial_mode(self) -> str:
        """Removal shares one starting network; rewiring draws one per realization."""
        if self.initial is not None:
            return self.initial
        return "fresh" if self.experiment == "REWIRING" else "shared"

    @property
    def cell_key(self) -> tuple:
        return EXPERIMENTS.index(self.experiment), MODELS.index(self.model)

    def __post_init__(self):
        problems = []
        if self.experiment not in EXPERIMENTS:
            problems.append(f"unknown experiment {self.experiment!r}")
        if self.model not in MODELS:
            problems.append(f"unknown model {self.model!r}")
        if self.realizations < 1:
            problems.append("realizations must be at least 1")
        if self.stride < 1:
            problems.append("stride must be at least 1")
        if self.rewiring not in REWIRING_MODES:
            problems.append(f"rewiring must be one of {REWIRING_MODES}")
        if self.initial is not None and self.initial not in INITIAL_MODES:
            problems.append(f"initial must be one of {INITIAL_MODES}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class SignatureMatrix:
    """Raw measurement trajectories of one (model, experiment) cell.

    ``values`` and ``flags`` have shape ``(measurements, grid, realizations)``.
    ``flags`` holds the measurement flag string of each cell ("" when clean);
    a flag containing ``degenerate`` marks a placeholder value.
    """

    experiment: str
    model: str
    grid: np.ndarray
    values: np.ndarray
    flags: np.ndarray
    measurements: tuple = MEASUREMENTS
    steps: np.ndarray | None = None
    seeds: dict = field(default_factory=dict)
    truncated: bool = False

    @property
    def degenerate(self) -> np.ndarray:
        return np.char.find(self.flags.astype(str), "degenerate") >= 0

    def index(self, measurement: str) -> int:
        return self.measurements.index(measurement)

    @property
    def num_realizations(self) -> int:
        return self.values.shape[2]


def remove_random_edge(g: Graph, rng) -> Graph:
    """Drop one uniformly chosen edge."""
    if g.num_edges == 0:
        raise ValueError("cannot remove an edge from an edgeless graph")
    i = rng.integers(g.num_edges)
    return g.with_edges(np.delete(g.edges, i, axis=0))


def rewire_random_edge(g: Graph, rng) -> Graph:
    """Move one uniformly chosen edge onto a uniformly chosen non-adjacent pair.

    The pair just vacated is not a candidate, so every step really changes
    the graph.
    """
    if g.num_edges == 0:
        raise ValueError("cannot rewire an edgeless graph")
    iu, ju = np.triu_indices(g.n, 1)
    free = g.adjacency()[iu, ju] == 0
    if not free.any():
        raise ValueError("complete graph: no non-adjacent pair to rewire to")
    i = rng.integers(g.num_edges)
    kept = np.delete(g.edges, i, axis=0)
    cand = np.flatnonzero(free)
    j = cand[rng.integers(len(cand))]
    return g.with_edges(np.vstack([kept, [[iu[j], ju[j]]]]))


def swap_random_edges(g: Graph, rng, max_tries: int = 100) -> Graph:
    """Degree-preserving double edge swap ``(a,b),(c,d) -> (a,d),(c,b)``."""
    if g.num_edges < 2:
        raise ValueError("double edge swap needs two edges")
    a_mat = g.adjacency()
    for _ in range(max_tries):
        i, j = rng.choice(g.num_edges, size=2, replace=False)
        a, b = g.edges[i]
        c, d = g.edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4 or a_mat[a, d] or a_mat[c, b]:
            continue
        kept = np.delete(g.edges, [i, j], axis=0)
        return g.with_edges(np.vstack([kept, [[a, d], [c, b]]]))
    raise ValueError(f"no valid double edge swap found in {max_tries} tries")


def _staged(stage, cfg, fn, *args):
    """Run ``fn`` and re-raise failures tagged with stage and cell."""
    try:
        return fn(*args)
    except NetPerturbError:
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(stage, (cfg.model, cfg.experiment), exc) from exc


def _measure_row(g, ring_only):
    reports = measure_all(g, ring_only=ring_only)
    return ([reports[m].value for m in MEASUREMENTS],
            [reports[m].flag for m in MEASUREMENTS])


def _size_task(args):
    cfg, size, seed = args
    g = _staged("generate", cfg, generate, cfg.model, size, cfg.avg_degree, seed, cfg.epsilon)
    vals, flags = _staged("measure", cfg, _measure_row, g, cfg.ring_only)
    return g.num_edges, vals, flags


def _perturb_task(args):
    cfg, g0, seed, n_steps = args
    rng = np.random.default_rng(seed)
    if cfg.experiment == "REMOVAL":
        step = remove_random_edge
    elif cfg.rewiring == "swap":
        step = swap_random_edges
    else:
        step = rewire_random_edge
    rows = []
    g = g0
    for t in range(n_steps + 1):
        if t > 0:
            g = _staged("perturb", cfg, step, g, rng)
        if t % cfg.stride == 0:
            rows.append((g.num_edges, *_staged("measure", cfg, _measure_row, g, cfg.ring_only)))
    return rows


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def default_workers() -> int:
    return int(os.environ.get("NETPERTURB_WORKERS", "1"))


def run_size_experiment(cfg: ExperimentConfig, workers: int | None = None) -> SignatureMatrix:
    """Fresh networks at every size of the grid, ``Q`` realizations each.

    The free variable at each size is the mean realized edge count.
    """
    if cfg.experiment != "SIZE":
        raise ValueError("run_size_experiment needs experiment SIZE")
    if not cfg.sizes:
        raise ValueError("size grid is empty")
    if cfg.model == "GEO":
        bad = [s for s in cfg.sizes if lattice_side(s) is None]
        if bad:
            raise ValueError(f"GEO sizes {bad} are not perfect squares")
    q = cfg.realizations
    tasks, seeds = [], {}
    for i, size in enumerate(cfg.sizes):
        for r in range(q):
            s = derive_seed(cfg.seed, *cfg.cell_key, i, r)
            seeds[(i, r)] = s
            tasks.append((cfg, size, s))
    results = _map(_size_task, tasks, workers or default_workers())
    n_m = len(MEASUREMENTS)
    values = np.empty((n_m, len(cfg.sizes), q))
    flags = np.full((n_m, len(cfg.sizes), q), "", dtype=object)
    edge_counts = np.empty((len(cfg.sizes), q))
    for (i, r), (e, vals, fl) in zip(seeds, results):
        edge_counts[i, r] = e
        values[:, i, r] = vals
        flags[:, i, r] = fl
    grid = edge_counts.mean(axis=1)
    return SignatureMatrix("SIZE", cfg.model, grid, values, flags,
                           steps=np.asarray(cfg.sizes), seeds={"cells": seeds})


def _run_perturbation(cfg: ExperimentConfig, workers) -> SignatureMatrix:
    """Shared driver for removal and rewiring.

    Every realization ``r`` walks its own random sequence (seed key
    ``(cell, 1, r)``) from either the shared initial network (key
    ``(cell, 0)``) or its own one (key ``(cell, 2, r)``). Initial networks
    are built here so a removal run can be capped before any graph empties.
    """
    side_ok = cfg.model != "GEO" or lattice_side(cfg.n) is not None
    if not side_ok:
        raise ValueError(f"GEO size {cfg.n} is not a perfect square")
    q = cfg.realizations
    if cfg.initial_mode == "fresh":
        init_seeds = [derive_seed(cfg.seed, *cfg.cell_key, 2, r) for r in range(q)]
        starts = [_staged("generate", cfg, generate, cfg.model, cfg.n, cfg.avg_degree, s,
                          cfg.epsilon) for s in init_seeds]
    else:
        init_seeds = [derive_seed(cfg.seed, *cfg.cell_key, 0)]
        g0 = _staged("generate", cfg, generate, cfg.model, cfg.n, cfg.avg_degree,
                     init_seeds[0], cfg.epsilon)
        starts = [g0] * q
    n_steps = cfg.steps
    truncated = False
    fewest = min(g.num_edges for g in starts)
    if cfg.experiment == "REMOVAL" and n_steps > fewest - 1:
        n_steps, truncated = fewest - 1, True
    seeds = [derive_seed(cfg.seed, *cfg.cell_key, 1, r) for r in range(q)]
    tasks = [(cfg, start, s, n_steps) for start, s in zip(starts, seeds)]
    results = _map(_perturb_task, tasks, workers or default_workers())
    steps = np.arange(0, n_steps + 1, cfg.stride)
    n_m = len(MEASUREMENTS)
    values = np.empty((n_m, len(steps), q))
    flags = np.full((n_m, len(steps), q), "", dtype=object)
    for r, rows in enumerate(results):
        for t, (_, vals, fl) in enumerate(rows):
            values[:, t, r] = vals
            flags[:, t, r] = fl
    if cfg.experiment == "REMOVAL":
        # identical across realizations unless each starts from its own network
        grid = np.array([[e for e, _, _ in rows] for rows in results], dtype=float).mean(axis=0)
    else:
        grid = steps.astype(float)
    return SignatureMatrix(cfg.experiment, cfg.model, grid, values, flags, steps=steps,
                           seeds={"initial": init_seeds, "realizations": seeds},
                           truncated=truncated)


def run_removal_experiment(cfg: ExperimentConfig, workers: int | None = None) -> SignatureMatrix:
    """Independent random removal sequences applied to one initial network.

    The grid is the edge count after each measured step, so it decreases.
    """
    if cfg.experiment != "REMOVAL":
        raise ValueError("run_removal_experiment needs experiment REMOVAL")
    return _run_perturbation(cfg, workers)


def run_rewiring_experiment(cfg: ExperimentConfig, workers: int | None = None) -> SignatureMatrix:
    """Independent random rewiring sequences, by default each on its own network.

    Starting every realization from the same network makes the mean curve
    track that network's regression toward its ensemble average, which for
    ER reads as a clean monotone trend; independent starting networks leave
    only the fluctuations. ``initial="shared"`` restores the other protocol.
    """
    if cfg.experiment != "REWIRING":
        raise ValueError("run_rewiring_experiment needs experiment REWIRING")
    return _run_perturbation(cfg, workers)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> SignatureMatrix:
    runner = {
        "SIZE": run_size_experiment,
        "REMOVAL": run_removal_experiment,
        "REWIRING": run_rewiring_experiment,
    }[cfg.experiment]
    return runner(cfg, workers)


def membership_table(labels: dict) -> tuple[list[str], list[list[str]]]:
    """Measurement x (model, experiment) label table.

    ``labels`` maps ``(model, experiment)`` to ``{measurement: label}``. All
    nine cells must be present. Returns the header and the 14 rows.
    """
    missing = [f"{m}/{e}" for e in EXPERIMENTS for m in MODELS if (m, e) not in labels]
    missing += [f"{m}/{e}:{x}" for (m, e), lab in sorted(labels.items())
                for x in MEASUREMENTS if x not in lab]
    if missing:
        raise ValueError("membership table is missing " + ", ".join(missing))
    cols = [(m, e) for e in EXPERIMENTS for m in MODELS]
    header = ["measurement"] + [f"{m}/{e}" for m, e in cols]
    rows = [[x] + [labels[c][x] for c in cols] for x in MEASUREMENTS]
    return header, rows
