class TraceGenError(Exception):
    """Root of every error raised by the generator."""


class FrontendError(TraceGenError):
    """An invalid W source file; carries the offending position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is None:
            where = ""
        elif column is None:
            where = f"line {line}: "
        else:
            where = f"{line}:{column}: "
        super().__init__(f"{where}{message}")


class SourceSyntaxError(FrontendError):
    """Source text does not follow the W grammar."""


class SortError(FrontendError):
    """Ill-sorted expression or formula."""

    def __init__(self, message: str, path: tuple[str, ...] = (), **kwargs):
        self.path = path
        if path:
            message = f"{message} (at {'/'.join(path)})"
        super().__init__(message, **kwargs)


class ScopeError(FrontendError):
    """Undeclared, duplicated or reserved identifier."""


class MutabilityError(FrontendError):
    """Assignment to a const variable."""


class ArityError(TraceGenError):
    """A timepoint expression is missing iteration arguments."""


class EmptyContextError(TraceGenError):
    """start_of was asked for a context without statements."""


class UnsupportedFeature(TraceGenError):
    """A formula cannot be written in the chosen SMT-LIB mode."""


class ProverError(TraceGenError):
    """The prover exited abnormally without a recognizable verdict."""

    def __init__(self, message: str, raw_output: str = ""):
        self.raw_output = raw_output
        super().__init__(message)


class SpawnError(TraceGenError):
    """The prover executable could not be started."""


class StepLimitExceeded(TraceGenError):
    """Execution did not reach the end within the step limit."""

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class OutOfBoundsRead(TraceGenError):
    """A const array was read outside [0, length)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)
