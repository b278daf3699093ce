"""Noise laws defined by their cumulant generating functions (CGF).

Two families are supported:

* Gaussian noise with CGF ``K(q) = i q nu - rho^2 q^2 / 2``.
* alpha-stable noise with CGF
  ``K(q) = i q nu - |rho q|^alpha (1 - i beta sign(q) tan(pi alpha / 2))``
  for ``alpha != 1`` (``alpha = 1`` is supported only with ``beta = 0``,
  the Cauchy law).

Convention: the characteristic function is ``phi(p) = E[exp(i p z)] = exp(K(p))``
and densities are recovered by ``D(z) = (1/2pi) int exp(-i p z) phi(p) dp``.
With this convention the stable family is the standard S1 parameterization
(positive beta skews the law to the right), which is also what the
Chambers-Mallows-Stuck sampler below produces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import erfc, gamma as gamma_fn

from .errors import (
    ParameterError,
    QuadratureConvergenceError,
    UndefinedMomentError,
    UnsupportedParameterizationError,
)

__all__ = [
    "GaussianNoiseParams",
    "StableNoiseParams",
    "NoiseModel",
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "cgf_eval",
    "cgf_time_scale",
    "density",
    "survival",
    "sample",
    "cumulants",
]

# |exp(K)| below this is treated as zero when truncating inversion integrals
_CHARFN_FLOOR_LOG = 36.84  # -log(1e-16)
# standardized |z| beyond which the power-law tail replaces quadrature
_TAIL_SWITCH = 25.0
# quadrature results may ring slightly negative; clamp down to this floor
_NEGATIVE_FLOOR = -1e-9


@dataclass(frozen=True)
class GaussianNoiseParams:
    """Gaussian noise law with location ``nu`` and scale ``rho > 0``."""

    nu: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")


@dataclass(frozen=True)
class StableNoiseParams:
    """alpha-stable noise law (S1 parameterization).

    alpha in (0, 2], beta in [-1, 1], location nu, scale rho > 0.
    alpha = 1 requires beta = 0: the skewed Cauchy case needs a logarithmic
    correction term this CGF family does not define.
    """

    alpha: float
    beta: float = 0.0
    nu: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1 <= self.beta <= 1:
            raise ParameterError(f"beta must lie in [-1, 1], got {self.beta}")
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if self.alpha == 1 and self.beta != 0:
            raise UnsupportedParameterizationError(
                "alpha = 1 with beta != 0 is not supported"
            )


NoiseModel = Union[GaussianNoiseParams, StableNoiseParams]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for the density/survival inversion integrals."""

    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    max_panels: int = 800

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ParameterError("quadrature tolerances must be positive")
        if self.max_panels < 1:
            raise ParameterError("max_panels must be at least 1")


DEFAULT_QUADRATURE = QuadratureConfig()


def _phi_alpha(alpha: float) -> float:
    if alpha == 2.0:
        return 0.0
    return math.tan(math.pi * alpha / 2.0)


def cgf_eval(model: NoiseModel, q) -> complex:
    """Evaluate the cumulant generating function K(q).

    Accepts real or complex ``q``.  For complex arguments the stable CGF is
    continued formally with |q| -> complex modulus and sign(q) -> q/|q|,
    which is the reading the Hamiltonian K(-i sigma p_X) requires.
    """
    q = complex(q)
    if isinstance(model, GaussianNoiseParams):
        return 1j * q * model.nu - model.rho**2 * q * q / 2.0
    if q == 0:
        return 0.0 + 0.0j
    if model.alpha == 1:  # beta == 0 enforced by the type
        return 1j * q * model.nu - model.rho * abs(q)
    mod = abs(q)
    unit = q / mod
    return 1j * q * model.nu - (model.rho * mod) ** model.alpha * (
        1 - 1j * model.beta * unit * _phi_alpha(model.alpha)
    )


def cgf_time_scale(model: NoiseModel, tau: float) -> NoiseModel:
    """Return the model whose CGF is tau * K(q) for all q.

    Gaussian: (nu, rho) -> (nu tau, rho sqrt(tau)).
    Stable: (alpha, beta, nu, rho) -> (alpha, beta, nu tau, rho tau^(1/alpha)).
    """
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    if isinstance(model, GaussianNoiseParams):
        return GaussianNoiseParams(nu=model.nu * tau, rho=model.rho * math.sqrt(tau))
    return StableNoiseParams(
        alpha=model.alpha,
        beta=model.beta,
        nu=model.nu * tau,
        rho=model.rho * tau ** (1.0 / model.alpha),
    )


def _tail_amplitude(alpha: float) -> float:
    # leading-order tail constant: P(Z > z) ~ C_alpha (1 + beta) z^-alpha
    return math.sin(math.pi * alpha / 2.0) * gamma_fn(alpha) / math.pi


def _stable_density_std(z: float, alpha: float, beta: float,
                        quad: QuadratureConfig) -> float:
    """Density of the standardized stable law (nu=0, rho=1) at z."""
    if abs(z) > _TAIL_SWITCH:
        side = 1.0 + beta if z > 0 else 1.0 - beta
        if side == 0.0:
            return 0.0
        return alpha * _tail_amplitude(alpha) * side * abs(z) ** (-alpha - 1.0)
    phi = _phi_alpha(alpha)

    def integrand(p):
        # Re exp(-ipz + K(p)) for p > 0
        return math.exp(-p**alpha) * math.cos(beta * phi * p**alpha - p * z)

    p_star = _CHARFN_FLOOR_LOG ** (1.0 / alpha)
    val, err = integrate.quad(
        integrand, 0.0, p_star,
        epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=quad.max_panels,
    )
    val /= math.pi
    err /= math.pi
    if err > 50 * max(quad.abs_tol, quad.rel_tol * abs(val)):
        raise QuadratureConvergenceError(
            f"stable density quadrature did not converge at z={z} "
            f"(alpha={alpha}, beta={beta})", residual=err)
    if val < _NEGATIVE_FLOOR:
        raise QuadratureConvergenceError(
            f"stable density quadrature returned {val} < {_NEGATIVE_FLOOR} "
            f"at z={z}", residual=abs(val))
    return max(val, 0.0)


def _stable_survival_std(z: float, alpha: float, beta: float,
                         quad: QuadratureConfig) -> float:
    """Survival function of the standardized stable law at z (Gil-Pelaez)."""
    if z > _TAIL_SWITCH:
        return min(1.0, _tail_amplitude(alpha) * (1.0 + beta) * z**-alpha)
    if z < -_TAIL_SWITCH:
        return 1.0 - min(1.0, _tail_amplitude(alpha) * (1.0 - beta) * abs(z) ** -alpha)
    phi = _phi_alpha(alpha)

    def integrand(p):
        # Im exp(-ipz + K(p)) / p for p > 0; finite limit at p -> 0
        pa = p**alpha
        return math.exp(-pa) * math.sin(beta * phi * pa - p * z) / p

    p_star = _CHARFN_FLOOR_LOG ** (1.0 / alpha)
    val, err = integrate.quad(
        integrand, 0.0, p_star,
        epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=quad.max_panels,
    )
    if err > 50 * max(quad.abs_tol, quad.rel_tol):
        raise QuadratureConvergenceError(
            f"stable survival quadrature did not converge at z={z} "
            f"(alpha={alpha}, beta={beta})", residual=err)
    return min(1.0, max(0.0, 0.5 + val / math.pi))


def density(model: NoiseModel, z: float, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Probability density D(z) of the noise law.

    Closed forms for the Gaussian family and the stable special cases
    alpha=2 (Gaussian of scale rho*sqrt(2)) and alpha=1, beta=0 (Cauchy);
    CGF-inversion quadrature otherwise.
    """
    if isinstance(model, GaussianNoiseParams):
        u = (z - model.nu) / model.rho
        return math.exp(-u * u / 2.0) / (model.rho * math.sqrt(2.0 * math.pi))
    if model.alpha == 2:
        return density(GaussianNoiseParams(model.nu, model.rho * math.sqrt(2.0)), z, quad)
    if model.alpha == 1:
        u = (z - model.nu) / model.rho
        return 1.0 / (math.pi * model.rho * (1.0 + u * u))
    u = (z - model.nu) / model.rho
    return _stable_density_std(u, model.alpha, model.beta, quad) / model.rho


def survival(model: NoiseModel, z: float, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Survival function F(z) = P(Z > z) = int_z^inf D."""
    if isinstance(model, GaussianNoiseParams):
        return 0.5 * erfc((z - model.nu) / (model.rho * math.sqrt(2.0)))
    if model.alpha == 2:
        return survival(GaussianNoiseParams(model.nu, model.rho * math.sqrt(2.0)), z, quad)
    if model.alpha == 1:
        u = (z - model.nu) / model.rho
        return 0.5 - math.atan(u) / math.pi
    u = (z - model.nu) / model.rho
    return _stable_survival_std(u, model.alpha, model.beta, quad)


def sample(model: NoiseModel, rng: np.random.Generator, size=None):
    """Draw variates with the model's law.

    Gaussian via the standard normal transform; stable via the
    Chambers-Mallows-Stuck construction (S1 output for alpha != 1).
    Identical generator state yields identical values.
    """
    if isinstance(model, GaussianNoiseParams):
        return model.nu + model.rho * rng.standard_normal(size)
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    w = rng.standard_exponential(size)
    alpha, beta = model.alpha, model.beta
    if alpha == 1:  # Cauchy (beta == 0 by construction)
        core = np.tan(u)
    elif alpha == 2:
        core = 2.0 * np.sin(u) * np.sqrt(w)
    else:
        ta = _phi_alpha(alpha)
        b0 = math.atan(beta * ta) / alpha
        s0 = (1.0 + beta**2 * ta**2) ** (1.0 / (2.0 * alpha))
        core = (
            s0 * np.sin(alpha * (u + b0)) / np.cos(u) ** (1.0 / alpha)
            * (np.cos(u - alpha * (u + b0)) / w) ** ((1.0 - alpha) / alpha)
        )
    return model.nu + model.rho * core


def cumulants(model: NoiseModel, n: int) -> float:
    """n-th cumulant c_n = (-i)^n K^(n)(0).

    Gaussian: c1 = nu, c2 = rho^2, c_n = 0 for n >= 3.  Stable laws only
    possess c1 (= nu, for alpha > 1); everything else raises.
    """
    if n < 1:
        raise ParameterError(f"cumulant order must be >= 1, got {n}")
    if isinstance(model, GaussianNoiseParams):
        if n == 1:
            return model.nu
        if n == 2:
            return model.rho**2
        return 0.0
    if n == 1 and model.alpha > 1:
        return model.nu
    raise UndefinedMomentError(
        f"cumulant c_{n} does not exist for the stable law alpha={model.alpha}"
    )
