"""Exception types shared across the package.

Every failure mode that callers are expected to catch has its own class;
generic ValueError/RuntimeError are reserved for programming errors.
"""


class CcegeomError(Exception):
    """Base class for all package-specific errors."""


class SingularMetric(CcegeomError):
    """Metric matrix failed a positive-definiteness check at some point."""


class DomainError(CcegeomError):
    """A point lies outside the declared coordinate chart."""


class DerivativeTolerance(CcegeomError):
    """Finite-difference extrapolation did not converge to tolerance."""


class UnsupportedDimension(CcegeomError):
    """Operation requested in a dimension the implementation does not cover
    (even boundary dimension would introduce logarithmic expansion terms)."""


class FitConditioning(CcegeomError):
    """Least-squares design matrix is too ill-conditioned to trust."""


class UnstableFit(CcegeomError):
    """Fitted coefficient moved too much under a stability perturbation
    (dropping a rung, rescaling the ladder)."""


class QuadratureTolerance(CcegeomError):
    """Mesh-doubling error estimate of a quadrature exceeds the tolerance."""


class CharacteristicFailure(CcegeomError):
    """Supplied Euler characteristic is inconsistent with its integral
    estimate; downstream conclusions are refused."""


class SolverFailure(CcegeomError):
    """Collocation/BVP solver did not converge."""


class PositivityViolation(CcegeomError):
    """A quantity that must be positive (eigenfunction, volume density)
    failed the check; usually signals non-Einstein input or a bug."""


class ModelParameterError(CcegeomError):
    """Model parameters outside the admissible range."""


class NotAvailable(CcegeomError):
    """Exact reference value requested for a quantity the model does not
    carry in closed form."""
