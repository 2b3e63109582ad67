"""Exception hierarchy shared across the package."""


class FieldshaperError(Exception):
    """Base class for all package errors."""


class ValidationError(FieldshaperError, ValueError):
    """A constructor argument or config value violates its constraints."""


class DomainError(FieldshaperError):
    """A point lies outside the region where an object is defined."""


class DegenerateMapError(FieldshaperError):
    """A coordinate map has non-positive Jacobian determinant."""


class UnsupportedError(FieldshaperError):
    """An operation was asked for outside its supported regime."""


class CompositionError(FieldshaperError):
    """Range/domain mismatch when composing two maps."""


class MaterialError(FieldshaperError):
    """A sampled diffusion tensor is not symmetric positive semi-definite."""


class GeometryError(FieldshaperError):
    """Mesh geometry failure (inverted element, Newton non-convergence)."""


class PointNotFoundError(FieldshaperError):
    """A query point is outside the mesh hull."""


class SetupError(FieldshaperError):
    """The assembled linear system is singular or inconsistent."""


class SolverError(FieldshaperError):
    """The iterative linear solver failed to converge."""


class ConfigError(FieldshaperError, ValueError):
    """A run configuration is malformed; the message names the offending key."""


class ComparisonError(FieldshaperError):
    """Two solutions being compared do not live on the same mesh."""


class NonArrivalError(FieldshaperError):
    """A probe point never crossed the arrival threshold."""
