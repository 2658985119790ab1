"""Exception taxonomy shared across the package.

Every failure caused by caller input derives from AuditError so the command
line layer can map it to exit code 2. Anything else escaping a command is a
bug and maps to exit code 1.
"""

from __future__ import annotations


class AuditError(ValueError):
    """Base class for all input and domain failures."""


class DomainError(AuditError):
    """A scalar argument is outside its mathematical domain."""


class InvalidIntervalError(AuditError):
    """A confidence interval is malformed (non-positive or inverted bounds)."""


class DegenerateIntervalError(InvalidIntervalError):
    """An interval has zero width, so no standard error can be derived."""


class SERecoveryError(AuditError):
    """A standard error cannot be recovered from (estimate, p) inputs."""


class EmptyInputError(AuditError):
    """An operation that needs at least one record received none."""


class OverflowGuardError(AuditError):
    """A count exceeds the guarded range for exact arithmetic."""


class ConfigError(AuditError):
    """A configuration object or file is invalid."""


class CsvFormatError(AuditError):
    """A CSV input failed validation.

    Carries one diagnostic per offending cell as (line, column, message)
    tuples; line numbers are 1-based file lines as reported by the csv
    reader, column is the header name.
    """

    def __init__(self, filename: str, diagnostics: list[tuple[int, str, str]]):
        self.filename = filename
        self.diagnostics = list(diagnostics)
        lines = "; ".join(
            f"{filename}:{line}:{column}: {message}"
            for line, column, message in self.diagnostics
        )
        super().__init__(lines or f"{filename}: invalid CSV")
