"""Exception hierarchy shared across the package."""


class IbistatError(Exception):
    """Base class for all package-specific errors."""


class DegenerateConfigurationError(IbistatError):
    """All three landmarks coincide; the shape is undefined."""


class DimensionMismatchError(IbistatError):
    """Operands live in different ambient dimensions."""


class OutOfDiskError(IbistatError):
    """Shape coordinates fall outside the closed unit disk."""


class DomainError(IbistatError, ValueError):
    """Argument outside the mathematical domain of a density or transform."""


class UndefinedCosineIBIError(IbistatError):
    """Cosine in-betweenness is undefined when side a or side c vanishes."""


class SingularCovarianceError(IbistatError):
    """Standardization impossible: covariance is singular or ill-conditioned."""


class InsufficientDataError(IbistatError):
    """Not enough finite values to compute the requested statistic."""


class InsufficientReplicatesError(IbistatError):
    """Too few bootstrap replicates to build a confidence region."""


class CsvParseError(IbistatError):
    """A CSV cell could not be parsed; carries the 1-based file line."""

    def __init__(self, line: int, column: str, message: str):
        super().__init__(f"line {line}, column {column!r}: {message}")
        self.line = line
        self.column = column


class UnknownGroupLabelError(IbistatError):
    """A group label in the data is not covered by the A/B/C mapping."""


class FewerThanThreeGroupsError(IbistatError):
    """The dataset does not contain all three mapped groups."""
