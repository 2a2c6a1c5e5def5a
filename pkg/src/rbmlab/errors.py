"""Exception types shared across the package.

Subclassing ValueError/RuntimeError keeps callers able to catch broadly,
while the CLI maps each family to a distinct exit code.
"""


class DimensionError(ValueError):
    """Array shapes or lengths do not match what an operation requires."""


class CapacityError(ValueError):
    """A model is too large for exact enumeration."""


class DataFormatError(ValueError):
    """A dataset or model file violates its documented format."""


class EmbeddingError(ValueError):
    """A hardware-graph embedding is unusable (broken or disconnected chain)."""


class TrainingError(RuntimeError):
    """Training failed; message carries the epoch and step indices."""


class TrainingDivergenceError(TrainingError):
    """A parameter update produced non-finite values."""


class UndefinedMetricError(ValueError):
    """A metric's denominator is zero. `denominator` names which one."""

    def __init__(self, message: str, denominator: str):
        super().__init__(message)
        self.denominator = denominator
