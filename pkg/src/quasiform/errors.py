"""Exception hierarchy. Input problems and numerical problems are kept apart so the CLI can map them to distinct exit codes."""


class MetricSourceError(ValueError):
    """Bad metric definition text (syntax, unknown names, dimension mismatch)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.reason = message


class NumericalError(ArithmeticError):
    """A computation could not be carried out at a point (domain violation, non-definite metric, ...)."""
