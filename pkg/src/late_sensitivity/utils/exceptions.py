"""Custom exceptions for LATE sensitivity analysis."""

from typing import List, Optional, Sequence


class LateSensitivityError(Exception):
    """Base exception for all LATE sensitivity errors."""

    def __init__(self, message: str, cause: Optional[Exception] = None) -> None:
        super().__init__(message)
        self.message = message
        self.cause = cause

    def __str__(self) -> str:
        if self.cause:
            return f"{self.message} (caused by: {self.cause})"
        return self.message


class ValidationError(LateSensitivityError):
    """Raised when input validation fails."""

    def __init__(
        self, message: str, field: Optional[str] = None, value: Optional[str] = None
    ) -> None:
        super().__init__(message)
        self.field = field
        self.value = value

    def __str__(self) -> str:
        if self.field and self.value is not None:
            return f"Validation error for '{self.field}': {self.message} (value: {self.value})"
        elif self.field:
            return f"Validation error for '{self.field}': {self.message}"
        return f"Validation error: {self.message}"


class IdentificationError(LateSensitivityError):
    """Raised when an estimand or estimator is undefined for the given input."""

    label = "Identification error"

    def __init__(
        self,
        message: str,
        quantity: Optional[str] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message, cause)
        self.quantity = quantity

    def __str__(self) -> str:
        parts = [self.label]
        if self.quantity:
            parts.append(f"for {self.quantity}")
        result = " ".join(parts) + f": {self.message}"
        if self.cause:
            result += f" (caused by: {self.cause})"
        return result


class NoCompliersError(IdentificationError):
    """Raised when the complier share is zero."""

    label = "No compliers"


class NoDefiersError(IdentificationError):
    """Raised when the defier share is zero."""

    label = "No defiers"


class WeakInstrumentError(IdentificationError):
    """Raised when the first stage is exactly zero (b = c, or k1 = k2 in a sample)."""

    label = "Weak instrument"


class NoTakersError(IdentificationError):
    """Raised when nobody takes the treatment in either arm."""

    label = "No takers"


class DegenerateInstrumentError(IdentificationError):
    """Raised when the instrument takes a single value in the data."""

    label = "Degenerate instrument"


class NotBinaryOutcomeError(IdentificationError):
    """Raised when a binary-outcome quantity is requested for non-binary outcomes."""

    label = "Outcome is not binary"


class AssumptionNotApplicableError(LateSensitivityError):
    """Raised when a result is requested outside the assumptions it needs."""


class OrientationError(LateSensitivityError):
    """Raised when the instrument is oriented the wrong way (k1 <= k2)."""

    def __init__(self, message: str, k1: float, k2: float) -> None:
        super().__init__(message)
        self.k1 = k1
        self.k2 = k2

    def __str__(self) -> str:
        return (
            f"Orientation error: {self.message} (k1={self.k1:.6g}, k2={self.k2:.6g}); "
            "relabel Z so that k1 > k2"
        )


class InconsistentInputsError(LateSensitivityError):
    """Raised when numeric inputs cannot come from any DGP."""


class ForgeError(LateSensitivityError):
    """Base for failures while constructing an adversarial twin."""

    def __init__(
        self,
        message: str,
        stage: Optional[str] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message, cause)
        self.stage = stage

    def __str__(self) -> str:
        parts = ["Forge error"]
        if self.stage:
            parts.append(f"during {self.stage}")
        result = " ".join(parts) + f": {self.message}"
        if self.cause:
            result += f" (caused by: {self.cause})"
        return result


class PreconditionViolatedError(ForgeError):
    """Raised when a forge precondition does not hold; names the failed inequality."""

    def __init__(self, inequality: str, detail: Optional[str] = None) -> None:
        message = f"precondition '{inequality}' does not hold"
        if detail:
            message += f" ({detail})"
        super().__init__(message, stage="preconditions")
        self.inequality = inequality
        self.detail = detail


class ConstructionDegenerateError(ForgeError):
    """Raised when a signed mixture produces a materially negative atom mass."""


class BootstrapFailedError(LateSensitivityError):
    """Raised when too many bootstrap resamples leave the statistic undefined."""

    def __init__(self, message: str, statistic: str, attempts: int) -> None:
        super().__init__(message)
        self.statistic = statistic
        self.attempts = attempts

    def __str__(self) -> str:
        return (
            f"Bootstrap failed for '{self.statistic}' after {self.attempts} attempts: "
            f"{self.message}"
        )


class RefuseToRunError(LateSensitivityError):
    """Raised when an experiment is asked to compare DGPs that are not equivalent."""

    def __init__(self, message: str, distance: float) -> None:
        super().__init__(message)
        self.distance = distance

    def __str__(self) -> str:
        return f"Refusing to run: {self.message} (distance: {self.distance:.3e})"


class FileOperationError(LateSensitivityError):
    """Raised when file operations fail."""

    def __init__(
        self,
        message: str,
        file_path: Optional[str] = None,
        operation: Optional[str] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message, cause)
        self.file_path = file_path
        self.operation = operation

    def __str__(self) -> str:
        parts = ["File operation error"]
        if self.operation:
            parts.append(f"during {self.operation}")
        if self.file_path:
            parts.append(f"for '{self.file_path}'")
        parts.append(f": {self.message}")

        result = " ".join(parts)
        if self.cause:
            result += f" (caused by: {self.cause})"
        return result


class DataLoadError(LateSensitivityError):
    """Raised when sample data cannot be loaded; carries offending line numbers."""

    def __init__(
        self,
        message: str,
        file_path: Optional[str] = None,
        line_numbers: Optional[Sequence[int]] = None,
        column: Optional[str] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message, cause)
        self.file_path = file_path
        self.line_numbers: List[int] = list(line_numbers or [])
        self.column = column

    def __str__(self) -> str:
        parts = ["Data load error"]
        if self.file_path:
            parts.append(f"for '{self.file_path}'")
        if self.column:
            parts.append(f"in column '{self.column}'")
        result = " ".join(parts) + f": {self.message}"
        if self.line_numbers:
            shown = ", ".join(str(n) for n in self.line_numbers[:20])
            if len(self.line_numbers) > 20:
                shown += f", ... ({len(self.line_numbers)} rows)"
            result += f" (lines: {shown})"
        if self.cause:
            result += f" (caused by: {self.cause})"
        return result


class DocumentError(LateSensitivityError):
    """Raised when a structured document cannot be parsed; carries its location."""

    def __init__(
        self,
        message: str,
        location: Optional[str] = None,
        file_path: Optional[str] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message, cause)
        self.location = location
        self.file_path = file_path

    def __str__(self) -> str:
        parts = ["Document error"]
        if self.file_path:
            parts.append(f"in '{self.file_path}'")
        if self.location:
            parts.append(f"at {self.location}")
        return " ".join(parts) + f": {self.message}"


class ConfigurationError(LateSensitivityError):
    """Raised when configuration is invalid."""

    def __init__(self, message: str, setting: Optional[str] = None) -> None:
        super().__init__(message)
        self.setting = setting

    def __str__(self) -> str:
        if self.setting:
            return f"Configuration error for '{self.setting}': {self.message}"
        return f"Configuration error: {self.message}"
