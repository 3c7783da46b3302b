"""Change curves and the statistics used to compare them.

A raw trajectory is first averaged over realizations, then turned into a
change curve by subtracting its minimum and dividing by its population
standard deviation. The same shift and scale are reused to standardize the
individual realizations when measuring their dispersion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DegeneracyError
from .experiments import SignatureMatrix

LABELS = ("A", "B", "C")


@dataclass(frozen=True)
class ChangeCurve:
    measurement: str
    grid: np.ndarray
    values: np.ndarray
    sigma: float
    minimum: float
    mean: float
    degenerate: bool


@dataclass(frozen=True)
class CurveStats:
    psi: float
    psi_degenerate: bool
    pearson: float
    pearson_degenerate: bool
    magnitude: float
    spearman: float
    level_range: float


@dataclass(frozen=True)
class Thresholds:
    """Knobs of the A/B/C classifier.

    ``monotonic``: minimum absolute Spearman correlation with the grid.
    ``magnitude_rel``: ``M`` must reach this fraction of the mean curve's
    range (never less than ``magnitude_floor``).
    ``dispersion``: maximum ``psi``; above it the mean curve is considered
    to move less than the realizations scatter around it.
    """

    monotonic: float = 0.8
    magnitude_rel: float = 1e-3
    magnitude_floor: float = 1e-9
    dispersion: float = 4.0


def mean_trajectory(sig: SignatureMatrix, measurement: str) -> np.ndarray:
    """Pointwise mean over realizations, skipping degenerate cells."""
    k = sig.index(measurement)
    vals = sig.values[k]
    ok = ~sig.degenerate[k] & np.isfinite(vals)
    counts = ok.sum(axis=1)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise DegeneracyError(
            f"{measurement}: every realization is degenerate at grid point "
            f"{int(empty[0])} (value {sig.grid[empty[0]]!r})")
    return np.where(ok, vals, 0.0).sum(axis=1) / counts


def normalize_curve(raw, grid=None, measurement: str = "", baseline: str = "min") -> ChangeCurve:
    """Shift a trajectory to zero baseline and scale it to unit population std.

    ``baseline="initial"`` subtracts the first value instead of the minimum;
    the resulting curve can then be negative.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.size < 2:
        raise ValueError("a change curve needs at least two grid points")
    grid = np.arange(raw.size, dtype=float) if grid is None else np.asarray(grid, dtype=float)
    if baseline == "min":
        base = raw.min()
    elif baseline == "initial":
        base = raw[0]
    else:
        raise ValueError(f"unknown baseline {baseline!r}")
    sigma = float(raw.std())
    # spreads at rounding level of the curve's own magnitude count as constant
    if sigma <= 1e-12 * max(1.0, float(np.abs(raw).max())):
        return ChangeCurve(measurement, grid, np.zeros_like(raw), 0.0, float(base),
                           float(raw.mean()), True)
    return ChangeCurve(measurement, grid, (raw - base) / sigma, sigma, float(base),
                       float(raw.mean()), False)


def _standardized(sig, measurement, curve):
    k = sig.index(measurement)
    vals = np.where(sig.degenerate[k], np.nan, sig.values[k])
    return (vals - curve.minimum) / curve.sigma if curve.sigma > 0 else vals


def psi_index(sig: SignatureMatrix, measurement: str, curve: ChangeCurve | None = None) -> float:
    """Mean over the grid of the across-realization std of standardized values.

    A constant mean curve has no scale to standardize with; then ``psi`` is 0
    when the realizations agree exactly and NaN otherwise. A one-point grid
    has no curve at all, and ``psi`` is the plain spread at that point.
    """
    if curve is None and len(sig.grid) == 1:
        k = sig.index(measurement)
        vals = np.where(sig.degenerate[k], np.nan, sig.values[k])[0]
        return 0.0 if np.nanmax(vals) == np.nanmin(vals) else float(np.nanstd(vals))
    if curve is None:
        curve = normalize_curve(mean_trajectory(sig, measurement), sig.grid, measurement)
    z = _standardized(sig, measurement, curve)
    spread = np.nanstd(z, axis=1)
    # identical realizations give exactly 0, not the rounding residue of nanstd
    spread[np.nanmax(z, axis=1) == np.nanmin(z, axis=1)] = 0.0
    if curve.degenerate:
        return 0.0 if np.all(spread == 0) else float("nan")
    return float(spread.mean())


def pearson_vs_freevar(curve: ChangeCurve) -> float:
    """Pearson correlation of a change curve with its grid; 0 if degenerate."""
    if curve.degenerate:
        return 0.0
    x = curve.grid - curve.grid.mean()
    y = curve.values - curve.values.mean()
    r = (x @ y) / np.sqrt((x @ x) * (y @ y))
    return float(np.clip(r, -1.0, 1.0))


def spearman_vs_freevar(curve: ChangeCurve) -> float:
    if curve.degenerate:
        return 0.0
    x = rankdata(curve.grid) - (len(curve.grid) + 1) / 2
    y = rankdata(curve.values) - (len(curve.values) + 1) / 2
    den = np.sqrt((x @ x) * (y @ y))
    return float(np.clip((x @ y) / den, -1.0, 1.0)) if den > 0 else 0.0


def magnitude_index(sig: SignatureMatrix, measurement: str, raw=None) -> float:
    """Mean absolute change of the raw mean curve from its first grid point."""
    raw = mean_trajectory(sig, measurement) if raw is None else np.asarray(raw, float)
    return float(np.abs(raw - raw[0]).mean())


def curve_stats(sig: SignatureMatrix, measurement: str,
                baseline: str = "min") -> tuple[ChangeCurve, CurveStats]:
    """Change curve of one measurement and its summary statistics."""
    raw = mean_trajectory(sig, measurement)
    curve = normalize_curve(raw, sig.grid, measurement, baseline)
    psi = psi_index(sig, measurement, curve)
    stats = CurveStats(
        psi=psi,
        psi_degenerate=curve.degenerate,
        pearson=pearson_vs_freevar(curve),
        pearson_degenerate=curve.degenerate,
        magnitude=magnitude_index(sig, measurement, raw),
        spearman=spearman_vs_freevar(curve),
        level_range=float(raw.max() - raw.min()),
    )
    return curve, stats


def classify_abc(curve: ChangeCurve, stats: CurveStats, thresholds: Thresholds = Thresholds()) -> str:
    """A (mostly increasing), B (mostly decreasing) or C (anything else).

    A curve only counts as monotone when its rank correlation with the grid
    is strong, its raw change is not negligible, and the realizations do not
    scatter more than the mean curve moves.
    """
    if curve.degenerate:
        return "C"
    floor = max(thresholds.magnitude_rel * stats.level_range, thresholds.magnitude_floor)
    if stats.magnitude < floor:
        return "C"
    if not np.isfinite(stats.psi) or stats.psi > thresholds.dispersion:
        return "C"
    if stats.spearman >= thresholds.monotonic:
        return "A"
    if stats.spearman <= -thresholds.monotonic:
        return "B"
    return "C"
