"""Exception types shared across the package."""


class CewlabError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(CewlabError):
    """Matrix fails the Hermiticity tolerance required by an eigensolve."""


class EigenNoConvergence(CewlabError):
    """Jacobi sweeps exhausted before the off-diagonal norm target was met."""


class DimensionMismatch(CewlabError):
    """Operands have incompatible shapes for the requested operation."""


class DegenerateConditioning(CewlabError):
    """Conditional probability undefined: local projections have vanishing weight."""


class UnknownPreset(CewlabError):
    """Measurement preset name not found for the given system kind."""


class EmptyDataset(CewlabError):
    """An operation received or would produce a dataset with no records."""


class DegenerateLabels(CewlabError):
    """Both classes are required but only one is present."""


class FormatError(CewlabError):
    """Persisted file does not match the declared format."""


class DivergedTraining(CewlabError):
    """Training loss became non-finite."""
