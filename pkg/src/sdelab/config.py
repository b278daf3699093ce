"""Experiment configuration: schema, parsing, validation.

The config is a JSON document (nested key-value with arrays).  Unknown keys
are rejected; domain violations name the offending field.  See
docs/config-schema.md for the full schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .engine import EnsembleConfig, GIDPSpec, ThresholdRule, make_process
from .errors import ConfigError, ParameterError, SdeLabError

__all__ = [
    "ProcessConfig",
    "ThresholdConfig",
    "AnalysisConfig",
    "EntropyConfig",
    "OutputConfig",
    "ExperimentConfig",
    "parse_config",
    "config_identity",
]

_PROCESS_KINDS = ("BM", "GBM", "LF", "GLF")


@dataclass(frozen=True)
class ProcessConfig:
    kind: str
    x0: float
    mu0: float
    sigma0: float
    t0: float = 0.0
    alpha: Optional[float] = None
    beta: Optional[float] = None


@dataclass(frozen=True)
class ThresholdConfig:
    x_v: Optional[float] = None
    mode: str = "mask"


@dataclass(frozen=True)
class EntropyConfig:
    enabled: bool = False
    q_values: Tuple[float, ...] = (1.0,)
    gauge_mode: str = "first-match"  # or "zero"
    rate_window: int = 1
    rate_points: Optional[int] = None  # log-spaced rate grid; None = full grid


@dataclass(frozen=True)
class AnalysisConfig:
    n_bins: int = 200
    range: Optional[Tuple[float, float]] = None
    range_quantiles: Optional[Tuple[float, float]] = None
    entropy: EntropyConfig = field(default_factory=EntropyConfig)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs"
    formats: Tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    process: ProcessConfig
    threshold: ThresholdConfig
    ensemble: EnsembleConfig
    analysis: AnalysisConfig
    output: OutputConfig

    def gidp_spec(self) -> GIDPSpec:
        p = self.process
        kwargs = {}
        if p.kind in ("LF", "GLF"):
            kwargs = {"alpha": p.alpha, "beta": p.beta}
        return make_process(p.kind, mu0=p.mu0, sigma0=p.sigma0, x0=p.x0,
                            t0=p.t0, **kwargs)

    def threshold_rule(self) -> ThresholdRule:
        t = self.threshold
        if t.x_v is None:
            return ThresholdRule.none()
        if t.mode == "absorb":
            return ThresholdRule.absorb_to_zero(t.x_v)
        return ThresholdRule.mask_below(t.x_v)


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError("required key missing", field=f"{path}.{key}")
    return mapping[key]


def _no_unknown(mapping: dict, allowed, path: str):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", field=path)


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=path)
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=path)
    return value


def parse_config(text) -> ExperimentConfig:
    """Parse and validate a config document (JSON text, dict, or path-like)."""
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be an object")
    _no_unknown(doc, ("process", "threshold", "ensemble", "analysis", "output"),
                "config")

    proc_doc = _require(doc, "process", "config")
    _no_unknown(proc_doc, ("kind", "x0", "t0", "mu0", "sigma0", "alpha", "beta"),
                "process")
    kind = _require(proc_doc, "kind", "process")
    if kind not in _PROCESS_KINDS:
        raise ConfigError(f"kind must be one of {_PROCESS_KINDS}, got {kind!r}",
                          field="process.kind")
    process = ProcessConfig(
        kind=kind,
        x0=_number(_require(proc_doc, "x0", "process"), "process.x0"),
        mu0=_number(_require(proc_doc, "mu0", "process"), "process.mu0"),
        sigma0=_number(_require(proc_doc, "sigma0", "process"), "process.sigma0"),
        t0=_number(proc_doc.get("t0", 0.0), "process.t0"),
        alpha=(_number(proc_doc["alpha"], "process.alpha")
               if "alpha" in proc_doc else None),
        beta=(_number(proc_doc["beta"], "process.beta")
              if "beta" in proc_doc else None),
    )

    thr_doc = doc.get("threshold", {})
    _no_unknown(thr_doc, ("x_v", "mode"), "threshold")
    mode = thr_doc.get("mode", "mask")
    if mode not in ("mask", "absorb"):
        raise ConfigError(f"mode must be 'mask' or 'absorb', got {mode!r}",
                          field="threshold.mode")
    threshold = ThresholdConfig(
        x_v=(_number(thr_doc["x_v"], "threshold.x_v")
             if "x_v" in thr_doc else None),
        mode=mode,
    )

    ens_doc = _require(doc, "ensemble", "config")
    _no_unknown(ens_doc, ("n_trajectories", "n_steps", "t_final",
                          "snapshot_times", "seed", "workers", "integrator"),
                "ensemble")
    snaps = _require(ens_doc, "snapshot_times", "ensemble")
    if not isinstance(snaps, list) or not snaps:
        raise ConfigError("snapshot_times must be a nonempty array",
                          field="ensemble.snapshot_times")

    ana_doc = doc.get("analysis", {})
    _no_unknown(ana_doc, ("n_bins", "range", "range_quantiles", "entropy"),
                "analysis")
    ent_doc = ana_doc.get("entropy", {})
    _no_unknown(ent_doc, ("enabled", "q_values", "gauge_mode", "rate_window",
                          "rate_points"),
                "analysis.entropy")
    gauge_mode = ent_doc.get("gauge_mode", "first-match")
    if gauge_mode not in ("first-match", "zero"):
        raise ConfigError("gauge_mode must be 'first-match' or 'zero'",
                          field="analysis.entropy.gauge_mode")
    entropy = EntropyConfig(
        enabled=bool(ent_doc.get("enabled", False)),
        q_values=tuple(_number(q, "analysis.entropy.q_values")
                       for q in ent_doc.get("q_values", [1.0])),
        gauge_mode=gauge_mode,
        rate_window=_integer(ent_doc.get("rate_window", 1),
                             "analysis.entropy.rate_window"),
        rate_points=(_integer(ent_doc["rate_points"], "analysis.entropy.rate_points")
                     if ent_doc.get("rate_points") is not None else None),
    )
    rng = ana_doc.get("range")
    rq = ana_doc.get("range_quantiles")
    if rng is not None and rq is not None:
        raise ConfigError("range and range_quantiles are mutually exclusive",
                          field="analysis")
    for name, pair in (("range", rng), ("range_quantiles", rq)):
        if pair is not None:
            if (not isinstance(pair, list) or len(pair) != 2
                    or not pair[0] < pair[1]):
                raise ConfigError(f"{name} must be an increasing [lo, hi] pair",
                                  field=f"analysis.{name}")
    if rq is not None and not (0.0 <= rq[0] < rq[1] <= 1.0):
        raise ConfigError("range_quantiles must lie in [0, 1]",
                          field="analysis.range_quantiles")
    analysis = AnalysisConfig(
        n_bins=_integer(ana_doc.get("n_bins", 200), "analysis.n_bins"),
        range=tuple(rng) if rng is not None else None,
        range_quantiles=tuple(rq) if rq is not None else None,
        entropy=entropy,
    )

    out_doc = doc.get("output", {})
    _no_unknown(out_doc, ("directory", "formats"), "output")
    output = OutputConfig(
        directory=str(out_doc.get("directory", "runs")),
        formats=tuple(out_doc.get("formats", ["csv", "json"])),
    )

    try:
        ensemble = EnsembleConfig(
            n_trajectories=_integer(_require(ens_doc, "n_trajectories", "ensemble"),
                                    "ensemble.n_trajectories"),
            n_steps=_integer(_require(ens_doc, "n_steps", "ensemble"),
                             "ensemble.n_steps"),
            t_final=_number(_require(ens_doc, "t_final", "ensemble"),
                            "ensemble.t_final"),
            snapshot_times=tuple(_number(t, "ensemble.snapshot_times")
                                 for t in snaps),
            seed=_integer(_require(ens_doc, "seed", "ensemble"), "ensemble.seed"),
            workers=_integer(ens_doc.get("workers", 1), "ensemble.workers"),
            integrator=str(ens_doc.get("integrator", "euler")),
        )
        cfg = ExperimentConfig(process=process, threshold=threshold,
                               ensemble=ensemble, analysis=analysis,
                               output=output)
        # materialize to trip every module-level domain check now
        spec = cfg.gidp_spec()
        cfg.threshold_rule().validate_for(spec)
        if ensemble.integrator == "exponential" and not spec.is_geometric:
            raise ParameterError(
                "the exponential integrator needs a geometric process")
    except SdeLabError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if analysis.n_bins < 2:
        raise ConfigError("n_bins must be >= 2", field="analysis.n_bins")
    if entropy.rate_window < 1:
        raise ConfigError("rate_window must be >= 1",
                          field="analysis.entropy.rate_window")
    return cfg


def config_identity(cfg: ExperimentConfig) -> dict:
    """Canonical dict of config fields that define the run's results.

    Execution-only fields (workers, output directory/formats) are excluded so
    runs that differ only in how they are executed hash identically.
    """
    p, t, e, a = cfg.process, cfg.threshold, cfg.ensemble, cfg.analysis
    return {
        "process": {"kind": p.kind, "x0": p.x0, "t0": p.t0, "mu0": p.mu0,
                    "sigma0": p.sigma0, "alpha": p.alpha, "beta": p.beta},
        "threshold": {"x_v": t.x_v, "mode": t.mode},
        "ensemble": {"n_trajectories": e.n_trajectories, "n_steps": e.n_steps,
                     "t_final": e.t_final,
                     "snapshot_times": list(e.snapshot_times),
                     "seed": e.seed, "integrator": e.integrator},
        "analysis": {"n_bins": a.n_bins, "range": list(a.range) if a.range else None,
                     "range_quantiles": (list(a.range_quantiles)
                                         if a.range_quantiles else None),
                     "entropy": {"enabled": a.entropy.enabled,
                                 "q_values": list(a.entropy.q_values),
                                 "gauge_mode": a.entropy.gauge_mode,
                                 "rate_window": a.entropy.rate_window,
                                 "rate_points": a.entropy.rate_points}},
    }
