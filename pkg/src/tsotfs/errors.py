"""Exception and warning types shared across the library."""


class TsotfsError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(TsotfsError):
    """Operands have non-conformal shapes."""


class RankDeficient(TsotfsError):
    """Matrix is numerically rank-deficient for the requested solve."""


class NotHermitian(TsotfsError):
    """Matrix fails the Hermitian symmetry check."""


class InvalidConfig(TsotfsError):
    """Configuration violates a structural constraint."""


class TerminalInactive(TsotfsError):
    """Requested per-terminal quantity for a terminal with no detected path."""


class IndexNotInSupport(TsotfsError):
    """Requested a support index that the recovery did not select."""


class DegenerateSubspace(TsotfsError):
    """Signal subspace too degenerate for a rotation estimate."""


class IterationBudgetExhausted(TsotfsError):
    """Greedy pursuit cannot reach the requested sparsity within its budget."""


class UndefinedMetric(TsotfsError):
    """Metric denominator is zero (no active terminal)."""


class NoActiveTerminals(UserWarning):
    """SNR is undefined with an empty active set; noise variance falls back to 0."""
