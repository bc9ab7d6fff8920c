"""Shared error taxonomy.

Every exception carries a stable machine-readable ``code`` so the HTTP layer
and clients never have to parse messages.
"""


class WorkbenchError(Exception):
    """Base class for all domain errors."""

    code = "internal_error"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


# dataset ingestion
class MissingColumn(WorkbenchError):
    code = "missing_column"


class NonNumericValue(WorkbenchError):
    code = "non_numeric_value"


class NegativeFeature(WorkbenchError):
    code = "negative_feature"


class EmptyDataset(WorkbenchError):
    code = "empty_dataset"


class DuplicateId(WorkbenchError):
    code = "duplicate_id"


class UnknownElement(WorkbenchError):
    code = "unknown_element"


class UnknownDataset(WorkbenchError):
    code = "unknown_dataset"


# selection / grouping
class DegeneratePolygon(WorkbenchError):
    code = "degenerate_polygon"


class UnknownGroup(WorkbenchError):
    code = "unknown_group"


class GroupLocked(WorkbenchError):
    code = "group_locked"


class GroupLimitExceeded(WorkbenchError):
    code = "group_limit_exceeded"


class UnknownPoint(WorkbenchError):
    code = "unknown_point"


# statistics
class EmptyInput(WorkbenchError):
    code = "empty_input"


class NonFiniteValue(WorkbenchError):
    code = "non_finite_value"


class EmptySelection(WorkbenchError):
    code = "empty_selection"


class NegativeValue(WorkbenchError):
    code = "negative_value"


# dimensionality reduction
class TooFewRows(WorkbenchError):
    code = "too_few_rows"


class InvalidFraction(WorkbenchError):
    code = "invalid_fraction"


class PerplexityTooLarge(WorkbenchError):
    code = "perplexity_too_large"


class TooFewPoints(WorkbenchError):
    code = "too_few_points"


class TooManyPoints(WorkbenchError):
    code = "too_many_points"


# clustering
class KTooLarge(WorkbenchError):
    code = "k_too_large"


class EmptyMatrix(WorkbenchError):
    code = "empty_matrix"


class InvalidConfig(WorkbenchError):
    code = "invalid_config"

    def __init__(self, message: str = "", field: str | None = None, **context):
        super().__init__(message, **context)
        self.field = field


# workspace persistence
class UnsupportedVersion(WorkbenchError):
    code = "unsupported_version"


class MalformedWorkspace(WorkbenchError):
    code = "malformed_workspace"


class SinkFailure(WorkbenchError):
    code = "sink_failure"


class TimeBudgetExceeded(WorkbenchError):
    code = "time_budget_exceeded"
