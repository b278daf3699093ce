"""Survivor histograms and the density-fit metrics (R^2, MAE)."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ParameterError, UndefinedMetricError

__all__ = ["HistogramSeries", "histogram", "r_squared", "mae", "export_fit"]


@dataclass(frozen=True)
class HistogramSeries:
    """Survivor-normalized empirical density on a fixed binning.

    densities are per-unit-x, counts / (n_survivors * width); when the range
    clips part of the sample, sum(density * width) equals the in-range
    survivor fraction rather than 1.
    """

    edges: np.ndarray
    densities: np.ndarray
    counts: np.ndarray
    n_survivors: int

    def __post_init__(self):
        if np.any(np.diff(self.edges) <= 0):
            raise ParameterError("edges must be strictly increasing")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


def histogram(values: np.ndarray, alive: np.ndarray, n_bins: int,
              range_: Union[str, Tuple[float, float]] = "auto") -> HistogramSeries:
    """Bin the surviving snapshot values.

    range_ is "auto" ([min, max] of survivors) or an explicit (lo, hi).
    Bins are half-open [e_i, e_{i+1}) with the last bin closed (numpy
    convention).  Densities are normalized by the total survivor count.
    """
    if n_bins < 2:
        raise ParameterError(f"n_bins must be >= 2, got {n_bins}")
    values = np.asarray(values, dtype=float)
    alive = np.asarray(alive, dtype=bool)
    if values.shape != alive.shape:
        raise ParameterError("values and alive must have equal length")
    survivors = values[alive]
    n_surv = survivors.size
    if n_surv == 0:
        raise ParameterError("no surviving values to histogram")
    if range_ == "auto":
        lo, hi = float(survivors.min()), float(survivors.max())
        if lo == hi:  # degenerate single-point sample
            lo, hi = lo - 0.5, hi + 0.5
    else:
        lo, hi = float(range_[0]), float(range_[1])
        if not hi > lo:
            raise ParameterError(f"empty histogram range ({lo}, {hi})")
    counts, edges = np.histogram(survivors, bins=n_bins, range=(lo, hi))
    widths = np.diff(edges)
    densities = counts / (n_surv * widths)
    return HistogramSeries(edges=edges, densities=densities,
                           counts=counts, n_survivors=n_surv)


def r_squared(empirical: np.ndarray, model: np.ndarray) -> float:
    """Coefficient of determination 1 - SS_res / SS_tot.

    SS_tot is taken about the empirical mean; a constant empirical array
    leaves the metric undefined.
    """
    empirical = np.asarray(empirical, dtype=float)
    model = np.asarray(model, dtype=float)
    if empirical.shape != model.shape or empirical.size < 2:
        raise ParameterError("need two equal-length arrays of size >= 2")
    ss_res = float(((empirical - model) ** 2).sum())
    ss_tot = float(((empirical - empirical.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise UndefinedMetricError("empirical array has zero variance")
    return 1.0 - ss_res / ss_tot


def mae(empirical: np.ndarray, model: np.ndarray) -> float:
    """Mean absolute error between two equal-length arrays."""
    empirical = np.asarray(empirical, dtype=float)
    model = np.asarray(model, dtype=float)
    if empirical.shape != model.shape or empirical.size < 1:
        raise ParameterError("need two equal-length nonempty arrays")
    return float(np.abs(empirical - model).mean())


def export_fit(path, hist: HistogramSeries, model: np.ndarray) -> Path:
    """Write a bin_center,density,model,abs_error CSV."""
    path = Path(path)
    model = np.asarray(model, dtype=float)
    with open(path, "w") as fh:
        fh.write("bin_center,density,model,abs_error\n")
        for c, d, m in zip(hist.centers, hist.densities, model):
            fh.write(f"{c:.17g},{d:.17g},{m:.17g},{abs(d - m):.17g}\n")
    return path
