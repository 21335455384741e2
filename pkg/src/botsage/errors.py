"""Exception types shared across the package."""


class BotsageError(Exception):
    """Base class for every error this package raises deliberately."""


class FormatError(BotsageError):
    """A binary or text artifact does not match its documented layout."""


class DataError(BotsageError):
    """Input data violates an invariant (malformed row, non-finite value, ...)."""


class DuplicateUserError(DataError):
    """The same user_id appears more than once in a dataset."""


class MissingMetadataError(BotsageError):
    """An operation needing the four auxiliary counts got a dataset without them."""


class EmptyInputError(BotsageError):
    """An operation that needs at least one row received none."""


class DimensionError(BotsageError):
    """Vector or matrix shapes are inconsistent."""


class EmptyMaskError(BotsageError):
    """A masked reduction received an empty node subset."""


class BatchTooSmallError(BotsageError):
    """Batch statistics are undefined for the given batch size."""


class TrainingDivergedError(BotsageError):
    """The training loss became non-finite."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")


class ModelMismatchError(BotsageError):
    """A trained model was applied to data with incompatible dimensions."""


class DegenerateLabelsError(BotsageError):
    """A ranking metric needs both classes present in the ground truth."""
