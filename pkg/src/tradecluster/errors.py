"""Exception types raised across the pipeline.

Every error derives from :class:`ClusterError` so the CLI can report any
stage failure on a single line.
"""


class ClusterError(Exception):
    """Base class for all pipeline errors."""


# dataset
class MissingFile(ClusterError, FileNotFoundError):
    pass


class DuplicateEntityId(ClusterError, ValueError):
    def __init__(self, entity_id: str):
        super().__init__(f"duplicate entity id {entity_id!r}")
        self.entity_id = entity_id


class MissingColumn(ClusterError, KeyError):
    def __init__(self, column: str):
        super().__init__(column)
        self.column = column

    def __str__(self) -> str:
        return f"missing column {self.column!r}"


class InvalidTable(ClusterError, ValueError):
    pass


class NonPositiveRate(ClusterError, ValueError):
    def __init__(self, message: str, entity_id: str | None = None):
        super().__init__(message)
        self.entity_id = entity_id


class AllMissingColumn(ClusterError, ValueError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} has no observed values")
        self.column = column


class EmptyColumn(ClusterError, ValueError):
    pass


# affinity
class NonPositiveSigma(ClusterError, ValueError):
    pass


class TooFewRows(ClusterError, ValueError):
    pass


class DegenerateData(ClusterError, ValueError):
    pass


# shared by knn_sparsify, embed, kmeans
class KOutOfRange(ClusterError, ValueError):
    pass


# spectral
class ZeroDegree(ClusterError, ValueError):
    pass


class NotSymmetric(ClusterError, ValueError):
    pass


class NoConvergence(ClusterError, RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


# selection
class NotSorted(ClusterError, ValueError):
    pass


class TooShort(ClusterError, ValueError):
    pass


class RangeInvalid(ClusterError, ValueError):
    pass


class SingleCluster(ClusterError, ValueError):
    pass


class EmptyInput(ClusterError, ValueError):
    pass


# report
class CountMismatch(ClusterError, ValueError):
    pass


class EmptyAssignment(ClusterError, ValueError):
    pass


class IoError(ClusterError, OSError):
    def __init__(self, path, reason: str = ""):
        msg = f"cannot write {str(path)!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.path = str(path)

    def __str__(self) -> str:
        return self.args[0]
