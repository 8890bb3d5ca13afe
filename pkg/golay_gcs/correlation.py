"""非周期相関 (ACCF / AACF) と GCS 判定"""

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
import structlog

from golay_gcs.ebf import ComplexSequence
from golay_gcs.errors import ArgumentError

logger = structlog.get_logger(__name__)

# 零判定の相対許容誤差。tol = 1e-9 * M * L (tau = 0 のピークに比例)
RELATIVE_TOLERANCE = 1e-9


def default_tolerance(flock_size: int, length: int) -> float:
    return RELATIVE_TOLERANCE * flock_size * length


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    """tau in [-(L-1), L-1] -> 複素数。values[tau + L - 1] に格納する"""

    L: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if values.size != 2 * self.L - 1:
            raise ArgumentError(
                f"profile of length L={self.L} needs {2 * self.L - 1} values, got {values.size}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __getitem__(self, tau: int) -> complex:
        if abs(tau) >= self.L:
            return 0j
        return complex(self.values[tau + self.L - 1])

    def shifts(self) -> range:
        return range(-(self.L - 1), self.L)

    def items(self) -> Iterator[Tuple[int, complex]]:
        for tau in self.shifts():
            yield tau, self[tau]

    def as_dict(self) -> Dict[int, complex]:
        return dict(self.items())


def _check_same_length(a: ComplexSequence, b: ComplexSequence) -> int:
    if len(a) != len(b):
        raise ArgumentError(f"sequence lengths differ: {len(a)} vs {len(b)}")
    return len(a)


def accf(a: ComplexSequence, b: ComplexSequence, tau: int) -> complex:
    """rho(a, b)(tau) = sum_i a_i * conj(b_{i+tau})。|tau| >= L では 0"""
    L = _check_same_length(a, b)
    x, y = a.values, b.values
    if 0 <= tau < L:
        return complex(np.dot(x[: L - tau], np.conj(y[tau:])))
    if -L < tau < 0:
        return complex(np.dot(x[-tau:], np.conj(y[: L + tau])))
    return 0j


def aacf(a: ComplexSequence, tau: int) -> complex:
    return accf(a, a, tau)


def accf_profile(a: ComplexSequence, b: ComplexSequence) -> CorrelationProfile:
    L = _check_same_length(a, b)
    return CorrelationProfile(L, [accf(a, b, tau) for tau in range(-(L - 1), L)])


def aacf_profile(a: ComplexSequence) -> CorrelationProfile:
    return aacf_sum([a])


def _stack(sequences: Sequence[ComplexSequence]) -> np.ndarray:
    if not sequences:
        raise ArgumentError("the sequence set is empty")
    lengths = {len(s) for s in sequences}
    if len(lengths) != 1:
        raise ArgumentError(f"ragged sequence set, lengths {sorted(lengths)}")
    return np.stack([s.values for s in sequences])


def aacf_sum(sequences: Sequence[ComplexSequence]) -> CorrelationProfile:
    """sum_lambda rho(a_lambda)(tau) を全シフトについて計算する"""
    matrix = _stack(sequences)
    L = matrix.shape[1]
    positive = np.empty(L, dtype=np.complex128)
    for tau in range(L):
        positive[tau] = np.sum(matrix[:, : L - tau] * np.conj(matrix[:, tau:]))
    # rho(-tau) = conj(rho(tau))
    values = np.concatenate([np.conj(positive[:0:-1]), positive])
    return CorrelationProfile(L, values)


@dataclass(frozen=True)
class GcsVerdict:
    """is_gcs の結果。worst_tau は最大サイドローブの位置 (L = 1 なら None)"""

    passed: bool
    worst_tau: Optional[int]
    worst_magnitude: float
    peak: complex
    tolerance: float
    flock_size: int
    length: int

    def __bool__(self) -> bool:
        return self.passed


def verdict_from_profile(
    profile: CorrelationProfile, flock_size: int, tol: Optional[float] = None
) -> GcsVerdict:
    tolerance = default_tolerance(flock_size, profile.L) if tol is None else tol
    if tolerance < 0:
        raise ArgumentError(f"tolerance must be nonnegative, got {tolerance}")
    off_peak = np.abs(profile.values[profile.L :])
    if off_peak.size:
        index = int(np.argmax(off_peak))
        worst_tau: Optional[int] = index + 1
        worst_magnitude = float(off_peak[index])
    else:
        worst_tau, worst_magnitude = None, 0.0
    return GcsVerdict(
        passed=worst_magnitude <= tolerance,
        worst_tau=worst_tau,
        worst_magnitude=worst_magnitude,
        peak=profile[0],
        tolerance=tolerance,
        flock_size=flock_size,
        length=profile.L,
    )


def is_gcs(
    sequences: Sequence[ComplexSequence], tol: Optional[float] = None
) -> GcsVerdict:
    """tau != 0 の |AACF 和| の最大値が tol 以下なら GCS。tol 省略時は 1e-9 * M * L"""
    profile = aacf_sum(sequences)
    verdict = verdict_from_profile(profile, len(sequences), tol)
    logger.debug(
        "GCS check",
        passed=verdict.passed,
        worst_tau=verdict.worst_tau,
        worst_magnitude=verdict.worst_magnitude,
        tolerance=verdict.tolerance,
    )
    return verdict
