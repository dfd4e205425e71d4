"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: data problems (bad CSV, empty
selections, missing structural values) exit with 2, estimation failures
(rank deficiency, degenerate variance components) with 3.
"""


class ConvpanelError(Exception):
    """Base class for all package errors."""


class PanelDataError(ConvpanelError):
    """Invalid or unusable input data."""


class EstimationError(ConvpanelError):
    """A fit could not be carried out on otherwise valid data."""


class RankDeficientError(EstimationError):
    """Design matrix is numerically rank deficient.

    Carries the label of the first column whose pivot fell below the
    rank tolerance.
    """

    def __init__(self, column_label: str, message: str | None = None):
        self.column_label = column_label
        super().__init__(message or f"design matrix is rank deficient at column {column_label!r}")
