"""Renyi/Shannon entropies and Shannon entropy production rates.

Closed forms exist for the restricted BM and restricted GBM.  With
u = z_V / sqrt(tau) (BM) or v = w_V / sqrt(tau) (GBM), phi/F the standard
normal density/survival:

  H1[BM]  = b1 + 1/2 + ln sqrt(2 pi sigma0^2 tau) + ln F(u) + u phi(u)/(2 F(u))
  H1[GBM] = b1 + 1/2 + ln sqrt(2 pi sigma0^2 x0^2 tau) + mu0 tau
            + ln F(v) + w3 phi(v) / (2 sqrt(tau) F(v)),   w3 = w_V + 2 sigma0 tau

The production rates implemented here are the exact time derivatives of
these entropies (verified symbolically and against finite differences of the
direct quadrature): with z1 = (x_V - x0 + mu0 tau)/sigma0,

  dH1/dt[BM]  = 1/(2 tau) + z1 phi(u) (1 + u^2) / (4 tau^(3/2) F(u))
                - (z1 z_V / 4) (phi(u) / (tau F(u)))^2

and the GBM analog with (w2, w3, w4 = w2 + 2 sigma0 tau) auxiliaries plus the
drift term mu0.  The q != 1 Renyi closed forms follow the same survival-ratio
structure with the shifted argument w1 = w_V - sigma0 tau (1 - q)/q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .errors import DegenerateNormalizationError, ParameterError
from .metrics import HistogramSeries
from .solutions import RestrictedSolution, psi

__all__ = [
    "EntropyGauge",
    "BMEntropyParams",
    "GBMEntropyParams",
    "entropy_empirical",
    "renyi_bm_analytic",
    "renyi_gbm_analytic",
    "shannon_analytic",
    "shannon_bm_closed",
    "shannon_gbm_closed",
    "rate_bm",
    "rate_gbm",
    "rate_empirical",
    "moving_average",
    "export_series",
]

_SURVIVAL_FLOOR = 1e-300


@dataclass(frozen=True)
class EntropyGauge:
    """Renyi order q with amplitude a_q and gauge offset b_q.

    Shannon extensivity pins a_1 = 1.
    """

    q: float = 1.0
    a_q: float = 1.0
    b_q: float = 0.0

    def __post_init__(self):
        if not self.q > 0:
            raise ParameterError(f"q must be positive, got {self.q}")
        if self.q == 1.0 and self.a_q != 1.0:
            raise ParameterError("a_1 must equal 1")


@dataclass(frozen=True)
class BMEntropyParams:
    x0: float
    mu0: float
    sigma0: float

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ParameterError("sigma0 must be positive")


@dataclass(frozen=True)
class GBMEntropyParams:
    x0: float
    mu0: float
    sigma0: float

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ParameterError("sigma0 must be positive")
        if not self.x0 > 0:
            raise ParameterError("x0 must be positive")


def _std_pdf(u: float) -> float:
    return math.exp(-u * u / 2.0) / math.sqrt(2.0 * math.pi)


def _std_sf(u: float) -> float:
    return 0.5 * erfc(u / math.sqrt(2.0))


def _checked_sf(u: float) -> float:
    s = _std_sf(u)
    if s < _SURVIVAL_FLOOR:
        raise DegenerateNormalizationError(
            f"survival underflow at standardized threshold {u}")
    return s


def entropy_empirical(hist: HistogramSeries, gauge: EntropyGauge) -> float:
    """Entropy of a histogram with per-bin width correction.

    q = 1: -sum p_i ln(p_i / w_i) + b_1 over occupied bins.
    q != 1: b_q + a_q/(1-q) * ln sum p_i^q w_i^(1-q).
    p_i are in-histogram bin probabilities; empty bins contribute zero.
    """
    counts = np.asarray(hist.counts, dtype=float)
    widths = np.diff(hist.edges)
    total = counts.sum()
    if counts.size == 0 or total <= 0:
        raise ParameterError("histogram is empty")
    if np.any(widths <= 0):
        raise ParameterError("bin widths must be positive")
    p = counts / total
    occ = p > 0
    if gauge.q == 1.0:
        return float(-(p[occ] * np.log(p[occ] / widths[occ])).sum() + gauge.b_q)
    s = float((p[occ] ** gauge.q * widths[occ] ** (1.0 - gauge.q)).sum())
    return gauge.b_q + gauge.a_q / (1.0 - gauge.q) * math.log(s)


def renyi_bm_analytic(params: BMEntropyParams, x_v: float, tau: float,
                      gauge: EntropyGauge) -> float:
    """Renyi entropy of the restricted BM (q != 1)."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    q = gauge.q
    if q == 1.0:
        raise ParameterError("q = 1 is the Shannon limit; use shannon_analytic")
    z_v = (x_v - params.x0 - params.mu0 * tau) / params.sigma0
    h_q = gauge.b_q + gauge.a_q * math.log(q) / (2.0 * (q - 1.0))
    term = (q * math.log(_checked_sf(z_v / math.sqrt(tau)))
            - math.log(_checked_sf(z_v * math.sqrt(q / tau))))
    return (h_q + gauge.a_q * math.log(math.sqrt(2.0 * math.pi * params.sigma0**2 * tau))
            + gauge.a_q / (q - 1.0) * term)


def renyi_gbm_analytic(params: GBMEntropyParams, x_v: float, tau: float,
                       gauge: EntropyGauge) -> float:
    """Renyi entropy of the restricted GBM (q != 1)."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    if not x_v > 0:
        raise ParameterError("x_v must be positive for GBM")
    q = gauge.q
    if q == 1.0:
        raise ParameterError("q = 1 is the Shannon limit; use shannon_analytic")
    s0 = params.sigma0
    w_v = (math.log(x_v) - math.log(params.x0) - params.mu0 * tau) / s0
    w_1 = w_v - s0 * tau * (1.0 - q) / q
    g_q = gauge.b_q + gauge.a_q * math.log(q) / (2.0 * (q - 1.0))
    term = (q * math.log(_checked_sf(w_v / math.sqrt(tau)))
            - math.log(_checked_sf(w_1 * math.sqrt(q / tau))))
    return (g_q + gauge.a_q * (
        math.log(math.sqrt(2.0 * math.pi * s0**2 * params.x0**2 * tau))
        + params.mu0 * tau + s0**2 * tau * (1.0 - q) / (2.0 * q))
        + gauge.a_q / (q - 1.0) * term)


def shannon_bm_closed(params: BMEntropyParams, x_v: float, tau: float,
                      b_1: float = 0.0) -> float:
    """Closed-form Shannon entropy of the restricted BM (q -> 1 limit)."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    u = (x_v - params.x0 - params.mu0 * tau) / (params.sigma0 * math.sqrt(tau))
    sf = _checked_sf(u)
    return (b_1 + 0.5 + math.log(math.sqrt(2.0 * math.pi * params.sigma0**2 * tau))
            + math.log(sf) + u * _std_pdf(u) / (2.0 * sf))


def shannon_gbm_closed(params: GBMEntropyParams, x_v: float, tau: float,
                       b_1: float = 0.0) -> float:
    """Closed-form Shannon entropy of the restricted GBM (q -> 1 limit)."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    s0 = params.sigma0
    w_v = (math.log(x_v) - math.log(params.x0) - params.mu0 * tau) / s0
    v = w_v / math.sqrt(tau)
    w_3 = w_v + 2.0 * s0 * tau
    sf = _checked_sf(v)
    return (b_1 + 0.5
            + math.log(math.sqrt(2.0 * math.pi * s0**2 * params.x0**2 * tau))
            + params.mu0 * tau + math.log(sf)
            + w_3 * _std_pdf(v) / (2.0 * math.sqrt(tau) * sf))


def shannon_analytic(kind: str, params, x_v: float, tau: float,
                     gauge: EntropyGauge = EntropyGauge()) -> float:
    """Shannon entropy by direct quadrature of -int psi ln psi (authoritative).

    kind is "BM" or "GBM"; params the matching *EntropyParams.
    """
    if not tau > 0:
        raise ParameterError("tau must be positive")
    if kind == "BM":
        sol = RestrictedSolution("BM", params.x0, 0.0, params.mu0, params.sigma0,
                                 x_v)
        center = params.x0 + params.mu0 * tau
        spread = params.sigma0 * math.sqrt(tau)
        lo = max(x_v, center - 12.0 * spread)
        hi = center + 12.0 * spread
    elif kind == "GBM":
        sol = RestrictedSolution("GBM", params.x0, 0.0, params.mu0, params.sigma0,
                                 x_v)
        lcenter = math.log(params.x0) + params.mu0 * tau
        lspread = params.sigma0 * math.sqrt(tau)
        lo = max(x_v, math.exp(lcenter - 12.0 * lspread))
        hi = math.exp(lcenter + 12.0 * lspread)
    else:
        raise ParameterError(f"no analytic Shannon entropy for kind {kind!r}")

    def integrand(x):
        val = psi(sol, x, tau)
        return -val * math.log(val) if val > 0 else 0.0

    h, _ = integrate.quad(integrand, lo, hi, limit=400, epsabs=1e-10, epsrel=1e-9)
    return h + gauge.b_q


def rate_bm(params: BMEntropyParams, x_v: float, tau: float) -> float:
    """Shannon entropy production rate of the restricted BM at lag tau."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    s0 = params.sigma0
    z_v = (x_v - params.x0 - params.mu0 * tau) / s0
    z_1 = (x_v - params.x0 + params.mu0 * tau) / s0
    u = z_v / math.sqrt(tau)
    sf = _checked_sf(u)
    f = _std_pdf(u)
    return (1.0 / (2.0 * tau)
            + z_1 * f * (1.0 + u * u) / (4.0 * tau**1.5 * sf)
            - (z_1 * z_v / 4.0) * (f / (tau * sf)) ** 2)


def rate_gbm(params: GBMEntropyParams, x_v: float, tau: float) -> float:
    """Shannon entropy production rate of the restricted GBM at lag tau."""
    if not tau > 0:
        raise ParameterError("tau must be positive")
    s0 = params.sigma0
    w_v = (math.log(x_v) - math.log(params.x0) - params.mu0 * tau) / s0
    w_2 = (math.log(x_v) - math.log(params.x0) + params.mu0 * tau) / s0
    w_3 = w_v + 2.0 * s0 * tau
    w_4 = w_2 + 2.0 * s0 * tau
    v = w_v / math.sqrt(tau)
    sf = _checked_sf(v)
    f = _std_pdf(v)
    return (1.0 / (2.0 * tau) + params.mu0
            + w_4 * f / (4.0 * tau**1.5 * sf)
            + w_2 * w_v * w_3 * f / (4.0 * tau**2.5 * sf)
            - (w_2 * w_3 / 4.0) * (f / (tau * sf)) ** 2)


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with shrinking windows at the edges."""
    if window < 1:
        raise ParameterError("window must be positive")
    if window == 1:
        return np.asarray(values, dtype=float).copy()
    values = np.asarray(values, dtype=float)
    half = window // 2
    out = np.empty_like(values)
    for i in range(values.size):
        lo = max(0, i - half)
        hi = min(values.size, i + half + 1)
        out[i] = values[lo:hi].mean()
    return out


def rate_empirical(series: Sequence[Tuple[float, float]],
                   smoothing_window: int = 1) -> np.ndarray:
    """Numerical dH/dt of an entropy series: central differences inside,
    one-sided at the ends; optional moving-average pre-smoothing.

    Returns an array of (t, dH/dt) rows.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ParameterError("series needs at least 3 (t, H) points")
    t, h = arr[:, 0], arr[:, 1]
    if np.any(np.diff(t) <= 0):
        raise ParameterError("times must be strictly increasing")
    h = moving_average(h, smoothing_window)
    rate = np.gradient(h, t)
    return np.column_stack([t, rate])


def export_series(path, times: np.ndarray, entropy: np.ndarray,
                  rate: np.ndarray, extra: Optional[dict] = None) -> Path:
    """Write a (t, H, dH/dt [, extra columns]) CSV."""
    path = Path(path)
    names = ["t", "entropy", "rate"] + list(extra or {})
    columns = [times, entropy, rate] + [np.asarray(v) for v in (extra or {}).values()]
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*columns):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return path
