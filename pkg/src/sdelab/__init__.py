"""sdelab: ensembles and closed-form analytics for threshold-restricted
diffusions driven by Gaussian or alpha-stable noise."""

__version__ = "0.1.0"

from .noise import (  # noqa: F401
    GaussianNoiseParams,
    StableNoiseParams,
    NoiseModel,
    QuadratureConfig,
    cgf_eval,
    cgf_time_scale,
    cumulants,
    density,
    sample,
    survival,
)
from .engine import (  # noqa: F401
    Diffusion,
    Drift,
    EnsembleConfig,
    EnsembleResult,
    GIDPSpec,
    ThresholdRule,
    make_process,
    simulate_ensemble,
    step,
)
from .solutions import (  # noqa: F401
    FPConstCoeffProblem,
    RestrictedSolution,
    change_of_variable,
    drift_free_propagator,
    fp_const_coeff_solution,
    normalization_constant,
    psi,
    psi_grid,
)
from .actions import (  # noqa: F401
    CalculusParameterization,
    CoefficientField,
    hamiltonian,
    jacobian_log_factor_continuum,
    jacobian_log_factor_discrete,
    lagrangian,
    om_lagrangian,
)
from .entropy import (  # noqa: F401
    BMEntropyParams,
    EntropyGauge,
    GBMEntropyParams,
    entropy_empirical,
    rate_bm,
    rate_empirical,
    rate_gbm,
    renyi_bm_analytic,
    renyi_gbm_analytic,
    shannon_analytic,
    shannon_bm_closed,
    shannon_gbm_closed,
)
from .metrics import HistogramSeries, histogram, mae, r_squared  # noqa: F401
from .config import ExperimentConfig, parse_config  # noqa: F401
from .runner import RunManifest, reproduce, run  # noqa: F401
