"""
PMEPR (peak-to-mean envelope power ratio) の評価

包絡線 S_a(t) = sum_i zeta_q^{a_i} e^{2 pi sqrt(-1) (f + (i-1) df) t} の搬送波因子
e^{2 pi sqrt(-1) f t} は絶対値 1 なので落とし、u = df * t in [0, 1) の一様格子で評価する。
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from golay_gcs.construct import GcsSet
from golay_gcs.ebf import ZqSequence, root_of_unity_table
from golay_gcs.errors import ArgumentError, OutOfRangeError

logger = structlog.get_logger(__name__)

DEFAULT_OVERSAMPLING = 64
# 上界 (群サイズ M) との比較に使う許容誤差
BOUND_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class EnvelopeGrid:
    """u_j = j / (oversampling * L) における |S(u_j)|^2"""

    oversampling: int
    powers: np.ndarray

    @property
    def length(self) -> int:
        return self.powers.size // self.oversampling

    def grid(self) -> np.ndarray:
        return np.arange(self.powers.size) / self.powers.size


def envelope_power(
    a: ZqSequence, oversampling: int = DEFAULT_OVERSAMPLING
) -> EnvelopeGrid:
    if oversampling < 1:
        raise OutOfRangeError(f"oversampling must be >= 1, got {oversampling}")
    L = len(a)
    n = oversampling * L
    symbols = root_of_unity_table(a.q)[a.as_array()]
    # ifft は (1/n) sum_i s_i e^{+2 pi sqrt(-1) i j / n} (ゼロ詰め)
    envelope = np.fft.ifft(symbols, n=n) * n
    powers = np.clip(np.abs(envelope) ** 2, 0.0, float(L * L))
    powers.flags.writeable = False
    return EnvelopeGrid(oversampling=oversampling, powers=powers)


def pmepr(a: ZqSequence, oversampling: int = DEFAULT_OVERSAMPLING) -> float:
    """格子上の最大瞬時電力 / 平均電力 L"""
    grid = envelope_power(a, oversampling)
    return float(np.max(grid.powers)) / len(a)


def papr_db(value: float) -> float:
    """比を dB に換算する"""
    if value <= 0:
        return float("-inf")
    return float(10 * np.log10(value))


@dataclass(frozen=True)
class PmeprReport:
    values: Tuple[float, ...]
    gammas: Tuple[Optional[Tuple[int, ...]], ...]
    maximum: float
    bound: float
    oversampling: int

    @property
    def within_bound(self) -> bool:
        return self.maximum <= self.bound + BOUND_TOLERANCE


def pmepr_report(
    sequences: Union[GcsSet, Sequence[ZqSequence]],
    oversampling: int = DEFAULT_OVERSAMPLING,
    bound: Optional[float] = None,
    gammas: Optional[Sequence[Optional[Tuple[int, ...]]]] = None,
) -> PmeprReport:
    """
    各メンバーの PMEPR と最大値を求め、群サイズ M (構成直後の集合では p^k) の上界と比べる。
    bound を省略すると M = メンバー数を上界とする。gammas は系列を直接渡すときのラベル。
    """
    if isinstance(sequences, GcsSet):
        labels: List[Optional[Tuple[int, ...]]] = [m.gamma for m in sequences.members]
        sequences = sequences.zq_sequences()
    else:
        sequences = list(sequences)
        labels = list(gammas) if gammas is not None else [None] * len(sequences)
        if len(labels) != len(sequences):
            raise ArgumentError(
                f"{len(labels)} gamma labels for {len(sequences)} sequences"
            )
    if not sequences:
        raise ArgumentError("the sequence set is empty")

    values = tuple(pmepr(seq, oversampling) for seq in sequences)
    report = PmeprReport(
        values=values,
        gammas=tuple(labels),
        maximum=max(values),
        bound=float(len(sequences) if bound is None else bound),
        oversampling=oversampling,
    )
    if not report.within_bound:
        logger.debug(
            "PMEPR exceeds the flock-size bound",
            maximum=report.maximum,
            bound=report.bound,
        )
    return report
