"""Closed-form transition and restricted densities.

The drift-free propagator is the noise density under the time-scaled law;
the constant-coefficient solution adds a uniform decay factor exp(-tau V0)
and the standardized argument z_x = (x - x0 - mu0 tau) / sigma0.  The four
restricted processes share one structure: the time-scaled noise density in
the standardized variable (z for additive kinds, w = log-space for geometric
kinds), renormalized by the survival mass above the threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DegenerateNormalizationError, ParameterError
from .noise import (
    DEFAULT_QUADRATURE,
    GaussianNoiseParams,
    NoiseModel,
    QuadratureConfig,
    StableNoiseParams,
    cgf_time_scale,
    density,
    survival,
)

__all__ = [
    "RestrictedSolution",
    "FPConstCoeffProblem",
    "drift_free_propagator",
    "fp_const_coeff_solution",
    "change_of_variable",
    "normalization_constant",
    "psi",
    "psi_grid",
    "export_curve",
]

_SURVIVAL_FLOOR = 1e-12

_KINDS = ("BM", "GBM", "LF", "GLF")


@dataclass(frozen=True)
class RestrictedSolution:
    """Parameters of one of the four restricted processes.

    x_v may be -inf (BM/LF) to recover the unrestricted density; geometric
    kinds require x_v > 0 (use a tiny positive x_v for the unrestricted
    limit).
    """

    kind: str
    x0: float
    t0: float
    mu0: float
    sigma0: float
    x_v: float
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown kind {self.kind!r}")
        if not self.sigma0 > 0:
            raise ParameterError("sigma0 must be positive")
        if self.is_geometric:
            if not self.x0 > 0:
                raise ParameterError("geometric kinds need x0 > 0")
            if not self.x_v > 0:
                raise ParameterError("geometric kinds need x_v > 0")
        if self.is_stable and (self.alpha is None or self.beta is None):
            raise ParameterError(f"{self.kind} needs alpha and beta")

    @property
    def is_geometric(self) -> bool:
        return self.kind in ("GBM", "GLF")

    @property
    def is_stable(self) -> bool:
        return self.kind in ("LF", "GLF")

    def noise(self) -> NoiseModel:
        if self.is_stable:
            return StableNoiseParams(alpha=self.alpha, beta=self.beta, nu=0.0, rho=1.0)
        return GaussianNoiseParams(nu=0.0, rho=1.0)


@dataclass(frozen=True)
class FPConstCoeffProblem:
    """Constant drift/diffusion evolution with uniform absorptive rate V0."""

    mu0: float
    sigma0: float
    v0: float
    noise: NoiseModel
    x0: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ParameterError("sigma0 must be positive")
        if self.v0 < 0:
            raise ParameterError("v0 must be nonnegative")


def drift_free_propagator(noise: NoiseModel, dx: float, tau: float,
                          quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Transition kernel of the drift-free additive process over lag tau."""
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    return density(cgf_time_scale(noise, tau), dx, quad)


def fp_const_coeff_solution(problem: FPConstCoeffProblem, x: float, t: float,
                            quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Density-valued solution exp(-tau V0)/sigma0 * D_tau(z_x)."""
    tau = t - problem.t0
    if not tau > 0:
        raise ParameterError(f"t must exceed t0, got t={t}, t0={problem.t0}")
    z = (x - problem.x0 - problem.mu0 * tau) / problem.sigma0
    scaled = cgf_time_scale(problem.noise, tau)
    return math.exp(-tau * problem.v0) / problem.sigma0 * density(scaled, z, quad)


def change_of_variable(kind: str, x: float, x0: float) -> float:
    """Identity -> x - x0; Log -> ln x - ln x0 (the linear-coefficient map)."""
    if kind == "identity":
        return x - x0
    if kind == "log":
        if not (x > 0 and x0 > 0):
            raise ParameterError("log change of variable needs positive inputs")
        return math.log(x) - math.log(x0)
    raise ParameterError(f"unknown change of variable {kind!r}")


def normalization_constant(noise: NoiseModel, tau: float, z_v: float,
                           quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Threshold normalization 1 / F_tau(z_v) under the tau-scaled noise."""
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    surv = survival(cgf_time_scale(noise, tau), z_v, quad)
    if surv < _SURVIVAL_FLOOR:
        raise DegenerateNormalizationError(
            f"survival {surv} at z_v={z_v} is below {_SURVIVAL_FLOOR}; "
            "essentially all mass lies below the threshold")
    return 1.0 / surv


def _survival_factor(solution: RestrictedSolution, scaled: NoiseModel, tau: float,
                     quad: QuadratureConfig) -> float:
    if solution.is_geometric:
        s_v = (math.log(solution.x_v) - math.log(solution.x0)
               - solution.mu0 * tau) / solution.sigma0
    else:
        s_v = (solution.x_v - solution.x0 - solution.mu0 * tau) / solution.sigma0
    if s_v == -math.inf:
        return 1.0
    surv = survival(scaled, s_v, quad)
    if surv < _SURVIVAL_FLOOR:
        raise DegenerateNormalizationError(
            f"survival {surv} at threshold argument {s_v} is below "
            f"{_SURVIVAL_FLOOR}")
    return surv


def psi(solution: RestrictedSolution, x: float, t: float,
        quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Restricted density at (x, t); zero below the threshold."""
    tau = t - solution.t0
    if not tau > 0:
        raise ParameterError(f"t must exceed t0, got t={t}, t0={solution.t0}")
    if x < solution.x_v:
        return 0.0
    scaled = cgf_time_scale(solution.noise(), tau)
    surv = _survival_factor(solution, scaled, tau, quad)
    if solution.is_geometric:
        if not x > 0:
            return 0.0
        w = (math.log(x) - math.log(solution.x0) - solution.mu0 * tau) / solution.sigma0
        return density(scaled, w, quad) / (solution.sigma0 * x * surv)
    z = (x - solution.x0 - solution.mu0 * tau) / solution.sigma0
    return density(scaled, z, quad) / (solution.sigma0 * surv)


def psi_grid(solution: RestrictedSolution, xs: np.ndarray, t: float,
             quad: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Vectorized psi over a grid (shares the survival factor)."""
    tau = t - solution.t0
    if not tau > 0:
        raise ParameterError(f"t must exceed t0, got t={t}, t0={solution.t0}")
    xs = np.asarray(xs, dtype=float)
    scaled = cgf_time_scale(solution.noise(), tau)
    surv = _survival_factor(solution, scaled, tau, quad)
    out = np.zeros_like(xs)
    for i, x in enumerate(xs):
        if x < solution.x_v:
            continue
        if solution.is_geometric:
            if not x > 0:
                continue
            w = (math.log(x) - math.log(solution.x0)
                 - solution.mu0 * tau) / solution.sigma0
            out[i] = density(scaled, w, quad) / (solution.sigma0 * x * surv)
        else:
            z = (x - solution.x0 - solution.mu0 * tau) / solution.sigma0
            out[i] = density(scaled, z, quad) / (solution.sigma0 * surv)
    return out


def export_curve(solution: RestrictedSolution, xs: np.ndarray, t: float,
                 path, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> Path:
    """Write an (x, psi) CSV on a caller-supplied grid."""
    path = Path(path)
    values = psi_grid(solution, xs, t, quad)
    with open(path, "w") as fh:
        fh.write("x,psi\n")
        for x, v in zip(xs, values):
            fh.write(f"{x:.17g},{v:.17g}\n")
    return path
