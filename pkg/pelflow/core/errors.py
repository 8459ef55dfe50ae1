"""
Exception hierarchy for pelflow.

Services raise these; the CLI layer is the only place that catches them and
turns them into process exit codes.
"""
from typing import Optional


class PelFlowError(Exception):
    """Base class for all pelflow errors."""

    exit_code: int = 2


class ConfigError(PelFlowError):
    """Invalid or inconsistent run configuration."""

    exit_code = 1


# Data errors

class ImageFormatError(PelFlowError):
    """Malformed image file; names the offending header field."""

    def __init__(self, message: str, path: Optional[str] = None, field: Optional[str] = None):
        self.path = path
        self.field = field
        where = f"{path}: " if path else ""
        what = f"[{field}] " if field else ""
        super().__init__(f"{where}{what}{message}")


class UnsupportedFormatError(ImageFormatError):
    """Image file in a format other than binary 8-bit PGM."""


class TruncatedPayloadError(ImageFormatError):
    """Image payload shorter than its header declares."""


class FloFormatError(PelFlowError):
    """Malformed .flo file (bad magic tag, size mismatch or non-finite payload)."""


class DimensionMismatchError(PelFlowError):
    """Frames or fields whose dimensions disagree."""


class SceneParameterError(PelFlowError):
    """Synthetic scene parameters that cannot produce a valid sequence."""


class UndefinedSnrError(PelFlowError):
    """SNR requested for a constant (zero-variance) frame."""


class UndefinedImcError(PelFlowError):
    """IMC requested where both frame and displaced frame energies are zero."""


class DegenerateNeighborhoodError(PelFlowError):
    """Fewer than three in-bounds pixels survive mask clipping."""


class DegenerateSystemError(PelFlowError):
    """Linear system with too few observations."""


# Numeric errors

class NumericFailureError(PelFlowError):
    """Numeric failure that the fallback ladder could not absorb."""

    exit_code = 3


class SingularSystemError(NumericFailureError):
    """Singular 2x2 normal matrix."""


class MinimizerFailureError(NumericFailureError):
    """GCV minimizer found no finite value in its search box."""
