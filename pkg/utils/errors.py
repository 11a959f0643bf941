from typing import Any, Dict, List, Optional


class BouncerError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code = 3

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_record(self) -> Dict[str, Any]:
        record = {"error": type(self).__name__, "exit_code": self.exit_code, "message": self.message}
        record.update(self.context)
        return record


########## Input errors (exit 2) ##########
class ConfigError(BouncerError):
    exit_code = 2

    def __init__(self, message: str, issues: Optional[List[str]] = None, **context: Any):
        self.issues = list(issues or [])
        if self.issues:
            message = message + "\n" + "\n".join(f"  {issue}" for issue in self.issues)
        super().__init__(message, **context)


class DataError(BouncerError):
    exit_code = 2


class InconsistentDataError(DataError):
    pass


class UnfittableDataError(DataError):
    pass


########## Numerical errors (exit 3) ##########
class NumericalError(BouncerError):
    exit_code = 3


class OutOfDomainError(NumericalError):
    pass


class DomainTruncationError(NumericalError):
    pass


class SolverConsistencyError(NumericalError):
    pass


class UnsupportedIndexError(NumericalError):
    pass


class InfiniteAttenuationError(NumericalError):
    pass


class TotalAbsorptionError(NumericalError):
    pass


class ArityError(NumericalError):
    pass


class ScanError(BouncerError):
    """One slit of a scan failed; keeps the inner error's exit code."""

    def __init__(self, slit: float, cause: BouncerError):
        slit_um = slit * 1e6
        super().__init__(f"slit {slit_um:.6g} um: {cause.message}", slit_um=slit_um, cause=type(cause).__name__, **cause.context)
        self.exit_code = cause.exit_code
        self.cause = cause
