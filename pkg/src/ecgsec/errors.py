"""Error types shared across the package.

Every error carries a stable ``code`` (e.g. ``WRONG_LENGTH``) that the CLI
prints on standard error. The class decides the CLI exit status.
"""

from __future__ import annotations


class EcgSecError(Exception):
    """Base class; ``code`` names the failure."""

    exit_status = 2

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class DataError(EcgSecError):
    """Bad input data, record or model files, dimension problems."""

    exit_status = 2


class CryptoError(EcgSecError):
    """Container format or decryption failures (BAD_PADDING etc.)."""

    exit_status = 3
