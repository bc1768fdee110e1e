"""Exception type shared by every validator in the package."""

from __future__ import annotations


class InvariantViolation(ValueError):
    """Raised when an input breaks a documented invariant.

    ``code`` is a stable, machine-readable diagnostic id such as
    ``"wprime.slope"`` or ``"sheaf.depth-exceeds-dim"``; ``subject`` names the
    offending point, function or field when there is one.
    """

    def __init__(self, code: str, message: str, subject: str | None = None):
        self.code = code
        self.subject = subject
        where = f" [{subject}]" if subject is not None else ""
        super().__init__(f"{code}{where}: {message}")
