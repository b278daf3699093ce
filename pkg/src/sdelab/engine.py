"""Seeded, parallel Euler-Maruyama ensembles with threshold rules.

Trajectories are evolved in fixed blocks of :data:`BLOCK_SIZE`; each block
owns an independent RNG stream derived from the root seed by a spawn key, so
results are bitwise identical no matter how blocks are distributed over
workers.  Noise increments over a step dt are drawn from the dt-scaled noise
law (Gaussian: sd rho*sqrt(dt); stable: scale rho*dt^(1/alpha)).

Two threshold semantics are available:

* ``absorb_to_zero``: path-wise absorption.  A trajectory dipping below x_V
  is set to 0 and stays dead for all later times.
* ``mask_below``: observation-time rule.  Dynamics are unrestricted; at each
  snapshot the values below x_V are reported as 0/dead.  This is the rule
  under which ensembles match the survival-normalized restricted densities.

Two integrators:

* ``euler``: x += mu(x) dt + sigma(x) dW  (default).
* ``exponential``: exact-law sampling for geometric processes (linear drift
  and diffusion) by Euler on ln x, i.e. x = x0 exp(mu0 t + sigma0 L_t).
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Tuple

import numpy as np

from .errors import ConfigError, ParameterError, TrajectoryOverflowError
from .noise import (
    GaussianNoiseParams,
    NoiseModel,
    StableNoiseParams,
    cgf_time_scale,
    sample,
)

__all__ = [
    "BLOCK_SIZE",
    "Drift",
    "Diffusion",
    "GIDPSpec",
    "ThresholdRule",
    "EnsembleConfig",
    "EnsembleResult",
    "step",
    "simulate_ensemble",
    "iterate_ensemble",
    "make_process",
]

BLOCK_SIZE = 1024

_CONSTANT = "constant"
_LINEAR = "linear"


@dataclass(frozen=True)
class Drift:
    """Drift field mu(x): constant mu0 or linear mu0*x."""

    kind: str
    mu0: float

    def __post_init__(self):
        if self.kind not in (_CONSTANT, _LINEAR):
            raise ParameterError(f"unknown drift kind {self.kind!r}")

    def __call__(self, x):
        if self.kind == _LINEAR:
            return self.mu0 * x
        return self.mu0 * np.ones_like(x) if np.ndim(x) else self.mu0


@dataclass(frozen=True)
class Diffusion:
    """Diffusion field sigma(x): constant sigma0 or linear sigma0*x."""

    kind: str
    sigma0: float

    def __post_init__(self):
        if self.kind not in (_CONSTANT, _LINEAR):
            raise ParameterError(f"unknown diffusion kind {self.kind!r}")
        if not self.sigma0 > 0:
            raise ParameterError(f"sigma0 must be positive, got {self.sigma0}")

    def __call__(self, x):
        if self.kind == _LINEAR:
            return self.sigma0 * x
        return self.sigma0 * np.ones_like(x) if np.ndim(x) else self.sigma0


@dataclass(frozen=True)
class GIDPSpec:
    """Drift/diffusion structure, noise law and initial condition."""

    drift: Drift
    diffusion: Diffusion
    noise: NoiseModel
    x0: float
    t0: float = 0.0

    def __post_init__(self):
        if self.diffusion.kind == _LINEAR and not self.x0 > 0:
            raise ParameterError(
                f"geometric processes need x0 > 0, got {self.x0}")

    @property
    def is_geometric(self) -> bool:
        return self.drift.kind == _LINEAR and self.diffusion.kind == _LINEAR


@dataclass(frozen=True)
class ThresholdRule:
    """Threshold behaviour: none, path-wise absorption, or snapshot masking."""

    mode: str = "none"
    x_v: Optional[float] = None

    _MODES = ("none", "absorb", "mask")

    def __post_init__(self):
        if self.mode not in self._MODES:
            raise ParameterError(f"unknown threshold mode {self.mode!r}")
        if self.mode != "none" and self.x_v is None:
            raise ParameterError("threshold mode needs a threshold value x_v")

    @classmethod
    def none(cls) -> "ThresholdRule":
        return cls("none", None)

    @classmethod
    def absorb_to_zero(cls, x_v: float) -> "ThresholdRule":
        return cls("absorb", x_v)

    @classmethod
    def mask_below(cls, x_v: float) -> "ThresholdRule":
        return cls("mask", x_v)

    def validate_for(self, spec: GIDPSpec) -> None:
        if self.mode != "none" and spec.is_geometric and not self.x_v > 0:
            raise ParameterError(
                f"geometric processes need x_v > 0, got {self.x_v}")


@dataclass(frozen=True)
class EnsembleConfig:
    """Monte Carlo run parameters."""

    n_trajectories: int
    n_steps: int
    t_final: float
    snapshot_times: Tuple[float, ...]
    seed: int
    workers: int = 1
    integrator: str = "euler"

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ParameterError("n_trajectories must be positive")
        if self.n_steps < 1:
            raise ParameterError("n_steps must be positive")
        if self.workers < 1:
            raise ParameterError("workers must be positive")
        if self.integrator not in ("euler", "exponential"):
            raise ParameterError(f"unknown integrator {self.integrator!r}")
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))
        if list(self.snapshot_times) != sorted(self.snapshot_times):
            raise ParameterError("snapshot_times must be sorted")


@dataclass
class EnsembleResult:
    """Snapshots of a simulated ensemble: values and alive flags per time."""

    snapshot_times: np.ndarray          # (n_snaps,)
    values: np.ndarray                  # (n_snaps, n_trajectories)
    alive: np.ndarray                   # (n_snaps, n_trajectories) bool
    spec: GIDPSpec
    threshold: ThresholdRule
    config: EnsembleConfig

    def n_survivors(self, i: int) -> int:
        return int(self.alive[i].sum())

    def survivors(self, i: int) -> np.ndarray:
        return self.values[i][self.alive[i]]

    def to_csv(self, directory, float_format="%.17g") -> list:
        """Write one snapshot CSV (id,value,alive) per time; returns paths."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, t in enumerate(self.snapshot_times):
            path = directory / f"t_{t:g}.csv"
            with open(path, "w") as fh:
                fh.write("id,value,alive\n")
                vals, alive = self.values[i], self.alive[i]
                for j in range(vals.shape[0]):
                    fh.write(f"{j},{float_format % vals[j]},{int(alive[j])}\n")
            paths.append(path)
        return paths

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.snapshot_times).tobytes())
        h.update(np.ascontiguousarray(self.values).tobytes())
        h.update(np.ascontiguousarray(self.alive).tobytes())
        return h.hexdigest()

    def metadata(self) -> dict:
        spec = self.spec
        return {
            "process": {
                "drift": {"kind": spec.drift.kind, "mu0": spec.drift.mu0},
                "diffusion": {"kind": spec.diffusion.kind,
                              "sigma0": spec.diffusion.sigma0},
                "noise": _noise_dict(spec.noise),
                "x0": spec.x0,
                "t0": spec.t0,
            },
            "threshold": {"mode": self.threshold.mode, "x_v": self.threshold.x_v},
            "ensemble": {
                "n_trajectories": self.config.n_trajectories,
                "n_steps": self.config.n_steps,
                "t_final": self.config.t_final,
                "snapshot_times": list(self.config.snapshot_times),
                "seed": self.config.seed,
                "integrator": self.config.integrator,
            },
            "content_hash": self.content_hash(),
            "empty_snapshots": [float(t) for i, t in enumerate(self.snapshot_times)
                                if self.n_survivors(i) == 0],
        }


def _noise_dict(noise: NoiseModel) -> dict:
    if isinstance(noise, GaussianNoiseParams):
        return {"family": "gaussian", "nu": noise.nu, "rho": noise.rho}
    return {"family": "stable", "alpha": noise.alpha, "beta": noise.beta,
            "nu": noise.nu, "rho": noise.rho}


def step(x, dt: float, spec: GIDPSpec, noise_increment):
    """One Euler-Maruyama update: x + mu(x) dt + sigma(x) * increment.

    The increment must be drawn from the dt-scaled noise law,
    ``cgf_time_scale(spec.noise, dt)``.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    mu = spec.drift.mu0 * x if spec.drift.kind == _LINEAR else spec.drift.mu0
    sig = (spec.diffusion.sigma0 * x if spec.diffusion.kind == _LINEAR
           else spec.diffusion.sigma0)
    out = x + mu * dt + sig * noise_increment
    if np.ndim(out) == 0 and not math.isfinite(out):
        raise TrajectoryOverflowError(f"step produced non-finite value from x={x}")
    return out


def _snap_indices(spec: GIDPSpec, config: EnsembleConfig) -> Tuple[float, list]:
    span = config.t_final - spec.t0
    if not span > 0:
        raise ParameterError("t_final must exceed t0")
    dt = span / config.n_steps
    indices = []
    for t in config.snapshot_times:
        if not spec.t0 < t <= config.t_final + dt / 2:
            raise ConfigError(f"snapshot time {t} outside (t0, t_final]")
        k = int(round((t - spec.t0) / dt))
        if abs(spec.t0 + k * dt - t) > dt / 2 + 1e-12 or k < 1:
            raise ConfigError(
                f"snapshot time {t} is more than dt/2 from the nearest grid time")
        indices.append(min(k, config.n_steps))
    return dt, indices


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.PCG64(ss))


def _block_slices(n: int) -> list:
    return [(b, slice(b * BLOCK_SIZE, min((b + 1) * BLOCK_SIZE, n)))
            for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]


def _simulate_block(args):
    (spec, threshold, config, block_index, block_len, dt, snap_set) = args
    rng = _block_rng(config.seed, block_index)
    scaled = cgf_time_scale(spec.noise, dt)
    exponential = config.integrator == "exponential"
    if exponential:
        state = np.full(block_len, math.log(spec.x0))
    else:
        state = np.full(block_len, float(spec.x0))
    dead = np.zeros(block_len, dtype=bool)
    mu0, s0 = spec.drift.mu0, spec.diffusion.sigma0
    lin_mu = spec.drift.kind == _LINEAR
    lin_sig = spec.diffusion.kind == _LINEAR
    out_vals, out_alive = {}, {}
    for k in range(1, config.n_steps + 1):
        dw = sample(scaled, rng, size=block_len)
        if exponential:
            state = state + mu0 * dt + s0 * dw
            x = np.exp(state)
        else:
            mu = mu0 * state if lin_mu else mu0
            sig = s0 * state if lin_sig else s0
            state = state + mu * dt + sig * dw
            x = state
        if threshold.mode == "absorb":
            hit = ~dead & (x < threshold.x_v)
            dead |= hit
            if exponential:
                x = np.where(dead, 0.0, x)
            else:
                state = np.where(dead, 0.0, state)
                x = state
        live = ~dead
        bad = live & ~np.isfinite(x)
        if bad.any():
            idx = block_index * BLOCK_SIZE + int(np.argmax(bad))
            raise TrajectoryOverflowError(
                f"trajectory {idx} became non-finite at step {k}",
                trajectory_index=idx)
        if k in snap_set:
            if threshold.mode == "mask":
                alive = x >= threshold.x_v
            elif threshold.mode == "absorb":
                alive = live
            else:
                alive = np.ones(block_len, dtype=bool)
            out_vals[k] = np.where(alive, x, 0.0)
            out_alive[k] = alive
    return block_index, out_vals, out_alive


def simulate_ensemble(spec: GIDPSpec, threshold: ThresholdRule,
                      config: EnsembleConfig) -> EnsembleResult:
    """Simulate the ensemble and record snapshots at the requested times.

    Deterministic in (spec, threshold, config.seed) regardless of
    config.workers.
    """
    threshold.validate_for(spec)
    if config.integrator == "exponential" and not spec.is_geometric:
        raise ParameterError(
            "the exponential integrator needs linear drift and diffusion")
    dt, indices = _snap_indices(spec, config)
    snap_set = set(indices)
    n = config.n_trajectories
    blocks = _block_slices(n)
    tasks = [(spec, threshold, config, b, sl.stop - sl.start, dt, snap_set)
             for b, sl in blocks]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_simulate_block, tasks))
    else:
        results = [_simulate_block(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    n_snaps = len(indices)
    values = np.zeros((n_snaps, n))
    alive = np.zeros((n_snaps, n), dtype=bool)
    for (b, sl), (_, out_vals, out_alive) in zip(blocks, results):
        for i, k in enumerate(indices):
            values[i, sl] = out_vals[k]
            alive[i, sl] = out_alive[k]
    times = np.array([spec.t0 + k * dt for k in indices])
    return EnsembleResult(times, values, alive, spec, threshold, config)


def iterate_ensemble(spec: GIDPSpec, threshold: ThresholdRule,
                     config: EnsembleConfig) -> Iterator[Tuple[int, float, np.ndarray, np.ndarray]]:
    """Yield (step index, time, values, alive) after every grid step.

    Lockstep single-process variant for per-step statistics (entropy series).
    Blocks consume their RNG streams in the same order as simulate_ensemble,
    so trajectories agree bitwise between the two drivers.
    """
    threshold.validate_for(spec)
    if config.integrator == "exponential" and not spec.is_geometric:
        raise ParameterError(
            "the exponential integrator needs linear drift and diffusion")
    span = config.t_final - spec.t0
    if not span > 0:
        raise ParameterError("t_final must exceed t0")
    dt = span / config.n_steps
    n = config.n_trajectories
    blocks = _block_slices(n)
    rngs = [_block_rng(config.seed, b) for b, _ in blocks]
    scaled = cgf_time_scale(spec.noise, dt)
    exponential = config.integrator == "exponential"
    if exponential:
        state = np.full(n, math.log(spec.x0))
    else:
        state = np.full(n, float(spec.x0))
    dead = np.zeros(n, dtype=bool)
    mu0, s0 = spec.drift.mu0, spec.diffusion.sigma0
    lin_mu = spec.drift.kind == _LINEAR
    lin_sig = spec.diffusion.kind == _LINEAR
    for k in range(1, config.n_steps + 1):
        dw = np.empty(n)
        for (b, sl), rng in zip(blocks, rngs):
            dw[sl] = sample(scaled, rng, size=sl.stop - sl.start)
        if exponential:
            state = state + mu0 * dt + s0 * dw
            x = np.exp(state)
        else:
            mu = mu0 * state if lin_mu else mu0
            sig = s0 * state if lin_sig else s0
            state = state + mu * dt + sig * dw
            x = state
        if threshold.mode == "absorb":
            hit = ~dead & (x < threshold.x_v)
            dead |= hit
            if exponential:
                x = np.where(dead, 0.0, x)
            else:
                state = np.where(dead, 0.0, state)
                x = state
        live = ~dead
        bad = live & ~np.isfinite(x)
        if bad.any():
            idx = int(np.argmax(bad))
            raise TrajectoryOverflowError(
                f"trajectory {idx} became non-finite at step {k}",
                trajectory_index=idx)
        if threshold.mode == "mask":
            alive = x >= threshold.x_v
        elif threshold.mode == "absorb":
            alive = live.copy()
        else:
            alive = np.ones(n, dtype=bool)
        yield k, spec.t0 + k * dt, np.where(alive, x, 0.0), alive


def make_process(kind: str, mu0: float, sigma0: float, x0: float, t0: float = 0.0,
                 alpha: Optional[float] = None, beta: Optional[float] = None) -> GIDPSpec:
    """Build one of the four canonical processes.

    BM/LF: constant drift and diffusion; GBM/GLF: linear drift and diffusion.
    BM/GBM carry unit Gaussian noise, LF/GLF carry Stable(alpha, beta, 0, 1).
    """
    kind = kind.upper()
    if kind not in ("BM", "GBM", "LF", "GLF"):
        raise ParameterError(f"unknown process kind {kind!r}")
    if kind in ("LF", "GLF"):
        if alpha is None or beta is None:
            raise ParameterError(f"{kind} needs alpha and beta")
        noise: NoiseModel = StableNoiseParams(alpha=alpha, beta=beta, nu=0.0, rho=1.0)
    else:
        if alpha is not None or beta is not None:
            raise ParameterError(f"{kind} does not take alpha/beta")
        noise = GaussianNoiseParams(nu=0.0, rho=1.0)
    field_kind = _LINEAR if kind in ("GBM", "GLF") else _CONSTANT
    return GIDPSpec(
        drift=Drift(field_kind, mu0),
        diffusion=Diffusion(field_kind, sigma0),
        noise=noise,
        x0=x0,
        t0=t0,
    )
