"""Exception types shared across the package."""


class GridnerError(Exception):
    """Base class for all errors raised by this package."""


class ConflictError(GridnerError):
    """Two mentions demand different type labels at the same tail-head cell."""

    def __init__(self, cell, first, second):
        self.cell = cell
        self.first = first
        self.second = second
        super().__init__(
            f"conflicting type labels at cell {cell}: "
            f"{first.type_label} {list(first.token_indices)} vs "
            f"{second.type_label} {list(second.token_indices)}"
        )


class ShapeMismatch(GridnerError):
    """Array shapes or grid dimensions do not line up."""


class LengthMismatch(GridnerError):
    """Sequences that must have equal length do not."""


class ZeroSteps(GridnerError):
    """Bias correction requested before any averaging step was taken."""


class EmptyClass(GridnerError):
    """An operation requiring both classes got a dataset missing one."""


class TooFewRecords(GridnerError):
    """Fewer records than folds."""


class DataError(GridnerError):
    """Malformed input file or record; carries the offending location."""

    def __init__(self, message, record_id=None, line=None):
        self.record_id = record_id
        self.line = line
        where = ""
        if record_id is not None:
            where = f" (record {record_id!r})"
        elif line is not None:
            where = f" (line {line})"
        super().__init__(f"{message}{where}")
