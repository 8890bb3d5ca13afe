"""
参照実装 (オラクル)

相関は定義式を添字どおりに書き下したもので、correlation モジュールとはコードを共有しない。
q in {1, 2, 4} ではガウス整数で厳密に計算する。
"""

import itertools
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
import structlog

from golay_gcs.correlation import accf, aacf_profile, is_gcs
from golay_gcs.ebf import ComplexSequence, ZqSequence, zq_to_complex
from golay_gcs.errors import ArgumentError, SearchSpaceError

logger = structlog.get_logger(__name__)

MAX_SEARCH_SPACE = 10**7
MAX_SEARCH_LENGTH = 4
MAX_SEARCH_FLOCK = 2
SEARCH_TOLERANCE = 1e-9
ORACLE_TOLERANCE = 1e-12

# zeta_q^e をガウス整数 (実部, 虚部) で表した表
_GAUSSIAN_UNITS = {
    1: [(1, 0)],
    2: [(1, 0), (-1, 0)],
    4: [(1, 0), (0, 1), (-1, 0), (0, -1)],
}


def naive_accf(a: ComplexSequence, b: ComplexSequence, tau: int) -> complex:
    """sum_{i=1}^{L-tau} a_i conj(b_{i+tau}) (tau >= 0)、sum_{i=1}^{L+tau} a_{i-tau} conj(b_i) (tau < 0)"""
    x = [complex(v) for v in a.values]
    y = [complex(v) for v in b.values]
    L = len(x)
    if len(y) != L:
        raise ArgumentError(f"sequence lengths differ: {L} vs {len(y)}")

    total = 0j
    if 0 <= tau <= L - 1:
        for i in range(1, L - tau + 1):
            total += x[i - 1] * y[i + tau - 1].conjugate()
    elif -(L - 1) <= tau < 0:
        for i in range(1, L + tau + 1):
            total += x[i - tau - 1] * y[i - 1].conjugate()
    return total


def naive_accf_exact(
    a: Sequence[int], b: Sequence[int], q: int, tau: int
) -> Tuple[int, int]:
    """q in {1, 2, 4} の Z_q 系列について ACCF をガウス整数で厳密に求める"""
    if q not in _GAUSSIAN_UNITS:
        raise ArgumentError(f"exact arithmetic is available for q in (1, 2, 4), got {q}")
    L = len(a)
    if len(b) != L:
        raise ArgumentError(f"sequence lengths differ: {L} vs {len(b)}")
    units = _GAUSSIAN_UNITS[q]

    re, im = 0, 0
    pairs = []
    if 0 <= tau <= L - 1:
        pairs = [(i - 1, i + tau - 1) for i in range(1, L - tau + 1)]
    elif -(L - 1) <= tau < 0:
        pairs = [(i - tau - 1, i - 1) for i in range(1, L + tau + 1)]
    for i, j in pairs:
        x_re, x_im = units[a[i] % q]
        y_re, y_im = units[b[j] % q]
        # (x_re + i x_im) * (y_re - i y_im)
        re += x_re * y_re + x_im * y_im
        im += x_im * y_re - x_re * y_im
    return re, im


def verify_set_exact(rows: Sequence[ZqSequence]) -> bool:
    """全シフト tau != 0 で AACF 和がちょうど 0 になるかを厳密に確認する"""
    if not rows:
        raise ArgumentError("the sequence set is empty")
    q = rows[0].q
    L = len(rows[0])
    if any(row.q != q or len(row) != L for row in rows):
        raise ArgumentError("rows must share q and length")
    for tau in range(-(L - 1), L):
        if tau == 0:
            continue
        re, im = 0, 0
        for row in rows:
            r, i = naive_accf_exact(row.values, row.values, q, tau)
            re += r
            im += i
        if (re, im) != (0, 0):
            return False
    return True


def naive_is_gcs(rows: Sequence[ZqSequence]) -> bool:
    """オラクル側の GCS 判定。q in {2, 4} は厳密、それ以外は倍精度で 1e-9"""
    if not rows:
        raise ArgumentError("the sequence set is empty")
    if rows[0].q in _GAUSSIAN_UNITS:
        return verify_set_exact(rows)
    sequences = [zq_to_complex(row) for row in rows]
    L = len(sequences[0])
    for tau in range(1, L):
        total = sum(naive_accf(s, s, tau) for s in sequences)
        if abs(total) > SEARCH_TOLERANCE:
            return False
    return True


def direct_example1() -> List[List[int]]:
    """x1x2 + 3x1x2x3 + gamma1 x1 + gamma2 x3 (mod 4) を i = 0..18 で直接評価した 16x19 行列"""
    matrix = []
    for row in range(16):
        gamma1, gamma2 = row % 4, row // 4
        values = []
        for i in range(19):
            x1, x2, x3 = i % 4, (i // 4) % 4, i // 16
            values.append(
                (x1 * x2 + 3 * x1 * x2 * x3 + gamma1 * x1 + gamma2 * x3) % 4
            )
        matrix.append(values)
    return matrix


def exhaustive_tiny_search(q: int, L: int, M: int) -> List[Tuple[ZqSequence, ...]]:
    """
    長さ L、群サイズ M の Z_q 系列集合 (順序を無視した多重集合) を全列挙し、
    is_gcs (tol 1e-9) を満たすものをすべて返す。
    """
    if q < 2 or L < 1 or M < 1:
        raise ArgumentError(f"invalid search size q={q}, L={L}, M={M}")
    if L > MAX_SEARCH_LENGTH or M > MAX_SEARCH_FLOCK or q ** (L * M) > MAX_SEARCH_SPACE:
        raise SearchSpaceError(
            f"search space q^(L*M) = {q}^{L * M} with L={L}, M={M} exceeds the bound "
            f"(L <= {MAX_SEARCH_LENGTH}, M <= {MAX_SEARCH_FLOCK}, "
            f"q^(L*M) <= {MAX_SEARCH_SPACE})"
        )

    candidates = [
        ZqSequence(q=q, values=values)
        for values in itertools.product(range(q), repeat=L)
    ]
    # 各系列の tau = 1..L-1 の AACF を先に求め、組の和をまとめて判定する
    sidelobes = np.array(
        [aacf_profile(zq_to_complex(c)).values[L:] for c in candidates]
    ).reshape(len(candidates), L - 1)

    found: List[Tuple[ZqSequence, ...]] = []
    if M == 1:
        for index in np.flatnonzero(
            np.all(np.abs(sidelobes) <= SEARCH_TOLERANCE, axis=1)
        ):
            found.append((candidates[index],))
    else:
        for i in range(len(candidates)):
            sums = np.abs(sidelobes[i] + sidelobes[i:])
            for offset in np.flatnonzero(np.all(sums <= SEARCH_TOLERANCE, axis=1)):
                found.append((candidates[i], candidates[i + offset]))

    # 表引きでの絞り込み結果を is_gcs でも確認する
    found = [
        rows
        for rows in found
        if is_gcs([zq_to_complex(r) for r in rows], SEARCH_TOLERANCE).passed
    ]
    logger.debug("Exhaustive search finished", q=q, L=L, M=M, found=len(found))
    return found


@dataclass
class OracleReport:
    cases_run: int = 0
    mismatches: List[Tuple[str, complex, complex]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def compare_accf(
    cases: int,
    rng: np.random.Generator,
    max_length: int = 64,
    q_range: Tuple[int, int] = (2, 12),
) -> OracleReport:
    """ランダムな (a, b, tau) でライブラリの accf と naive_accf を比べる"""
    report = OracleReport()
    for _ in range(cases):
        q = int(rng.integers(q_range[0], q_range[1] + 1))
        L = int(rng.integers(1, max_length + 1))
        a = ZqSequence(q=q, values=tuple(int(v) for v in rng.integers(0, q, size=L)))
        b = ZqSequence(q=q, values=tuple(int(v) for v in rng.integers(0, q, size=L)))
        tau = int(rng.integers(-L, L + 1))
        library = accf(zq_to_complex(a), zq_to_complex(b), tau)
        oracle = naive_accf(zq_to_complex(a), zq_to_complex(b), tau)
        report.cases_run += 1
        if abs(library - oracle) > ORACLE_TOLERANCE:
            report.mismatches.append(
                (f"q={q} L={L} tau={tau} a={a.values} b={b.values}", library, oracle)
            )
    return report
