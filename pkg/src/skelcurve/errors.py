"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (``REJECT_NOT_COVERED``,
``NOT_FOUND``, ...) so the pipeline can name the failing stage in reports.
"""

from __future__ import annotations


class SkelCurveError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", *, code: str | None = None, detail=None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.detail = detail

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class ConfigError(SkelCurveError):
    code = "CONFIG_ERROR"


class ToleranceError(SkelCurveError):
    code = "BAD_TOLERANCE"


class DegenerateVertexSet(SkelCurveError):
    code = "DEGENERATE_VERTEXSET"


class SkeletonRejected(SkelCurveError):
    """``REJECT_NOT_COVERED`` or ``REJECT_DISCONNECTED``."""


class PartitionNotFound(SkelCurveError):
    code = "NOT_FOUND"


class SearchBudgetExceeded(PartitionNotFound):
    code = "BUDGET_EXCEEDED"


class SearchExhausted(SkelCurveError):
    code = "EXHAUSTED"


class RuleViolation(SkelCurveError):
    """``BAD_ENDPOINTS`` or ``BAD_EDGE_FORM``."""


class DomainMiss(SkelCurveError):
    code = "DOMAIN_MISS"


class BridgeCountViolation(SkelCurveError):
    code = "BRIDGE_COUNT_VIOLATION"


class SpectralMismatch(SkelCurveError):
    code = "SPECTRAL_MISMATCH"


class NotStronglyConnected(SkelCurveError):
    code = "NOT_STRONGLY_CONNECTED"


class NonConvergent(SkelCurveError):
    code = "NONCONVERGENT"


class WitnessInvalid(SkelCurveError):
    code = "WITNESS_INVALID"


class DepthOverflow(SkelCurveError):
    code = "DEPTH_OVERFLOW"
