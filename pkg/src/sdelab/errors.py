"""Exception hierarchy shared by all sdelab modules."""


class SdeLabError(Exception):
    """Base class for all sdelab errors."""

    #: machine-readable error code used by the CLI (see cli.py exit codes)
    code = "error"
    module = "sdelab"


class ParameterError(SdeLabError, ValueError):
    """A parameter is outside its mathematical domain."""

    code = "parameter-domain"


class UnsupportedParameterizationError(ParameterError):
    """Parameter combination the CGF family does not define (alpha=1 with skew)."""

    code = "unsupported-parameterization"


class QuadratureConvergenceError(SdeLabError):
    """Numerical quadrature failed to converge within its budget.

    Carries the residual error estimate of the failed integral.
    """

    code = "quadrature-convergence"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UndefinedMomentError(SdeLabError):
    """Requested cumulant/moment does not exist for the distribution."""

    code = "undefined-moment"


class DegenerateNormalizationError(SdeLabError):
    """Survival mass below the numerical floor; the restricted density is meaningless."""

    code = "degenerate-normalization"


class TrajectoryOverflowError(SdeLabError):
    """A simulated trajectory produced a non-finite value."""

    code = "trajectory-overflow"

    def __init__(self, message, trajectory_index=None):
        super().__init__(message)
        self.trajectory_index = trajectory_index


class SingularJacobianError(SdeLabError):
    """A discrete Jacobian factor crossed zero."""

    code = "singular-jacobian"


class UndefinedMetricError(SdeLabError):
    """Fit metric undefined for the given inputs (e.g. zero total variance)."""

    code = "undefined-metric"


class ConfigError(SdeLabError):
    """Experiment configuration is malformed or violates a domain constraint."""

    code = "config"

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class UnknownTargetError(ConfigError):
    """Unknown reproduction target name."""

    code = "unknown-target"
