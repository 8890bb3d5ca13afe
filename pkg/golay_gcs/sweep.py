"""
パラメータ空間のランダムスイープ

各試行で構成 -> GCS 判定 -> PMEPR 上界の確認を行う。試行は独立なのでスレッドで並列に実行し、
結果は完了順に関係なく試行番号の順で返す。
"""

import asyncio
import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import structlog

from golay_gcs.construct import build_gcs, infer_m, random_params
from golay_gcs.correlation import is_gcs
from golay_gcs.errors import UnsupportedParameterError
from golay_gcs.export import format_float
from golay_gcs.pmepr import DEFAULT_OVERSAMPLING, pmepr_report

logger = structlog.get_logger(__name__)

SWEEP_CSV_HEADER = [
    "p",
    "q",
    "L",
    "m",
    "k",
    "M",
    "verdict",
    "max_sidelobe",
    "max_pmepr",
    "note",
]


@dataclass(frozen=True)
class SweepDraw:
    index: int
    p: int
    q: int
    L: int
    seed: int


@dataclass(frozen=True)
class SweepRow:
    draw: SweepDraw
    m: int
    k: Optional[int]
    flock_size: Optional[int]
    verdict: str  # "true" / "false" / "skipped"
    max_sidelobe: Optional[float]
    max_pmepr: Optional[float]
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.verdict == "false"


def draw_parameters(
    p_values: Sequence[int],
    q_multipliers: Sequence[int],
    L_max: int,
    count: int,
    seed: int,
    L_min: Optional[int] = None,
) -> List[SweepDraw]:
    """
    (p, q, L) と試行ごとのシードを決める。L は [L_min, L_max] から一様に選び、
    L_min 省略時は p を下限にする。
    """
    rng = np.random.default_rng(seed)
    draws = []
    for index in range(count):
        p = int(rng.choice(p_values))
        q = p * int(rng.choice(q_multipliers))
        low = p if L_min is None else L_min
        L = int(rng.integers(low, L_max + 1)) if low <= L_max else L_max
        draws.append(
            SweepDraw(
                index=index, p=p, q=q, L=L, seed=int(rng.integers(0, 2**63 - 1))
            )
        )
    return draws


def run_draw(
    draw: SweepDraw,
    oversampling: int = DEFAULT_OVERSAMPLING,
    tolerance: Optional[float] = None,
) -> SweepRow:
    """1 試行分の構成と検証"""
    m = infer_m(draw.p, draw.L)
    try:
        params = random_params(draw.p, draw.q, draw.L, np.random.default_rng(draw.seed))
    except UnsupportedParameterError as e:
        return SweepRow(draw, m, None, None, "skipped", None, None, note=e.message)

    gcs = build_gcs(params)
    verdict = is_gcs(gcs.complex_sequences(), tolerance)
    report = pmepr_report(gcs, oversampling)
    passed = verdict.passed and report.within_bound
    if not passed:
        logger.warning(
            "Sweep draw failed",
            index=draw.index,
            params=params.summary(),
            worst_tau=verdict.worst_tau,
            worst_magnitude=verdict.worst_magnitude,
            max_pmepr=report.maximum,
        )
    return SweepRow(
        draw=draw,
        m=params.m,
        k=params.k,
        flock_size=gcs.flock_size,
        verdict="true" if passed else "false",
        max_sidelobe=verdict.worst_magnitude,
        max_pmepr=report.maximum,
    )


async def run_sweep(
    draws: Sequence[SweepDraw],
    oversampling: int = DEFAULT_OVERSAMPLING,
    tolerance: Optional[float] = None,
    jobs: int = 4,
) -> List[SweepRow]:
    semaphore = asyncio.Semaphore(max(1, jobs))

    async def worker(draw: SweepDraw) -> SweepRow:
        async with semaphore:
            return await asyncio.to_thread(run_draw, draw, oversampling, tolerance)

    rows = await asyncio.gather(*(worker(draw) for draw in draws))
    logger.debug(
        "Sweep finished",
        draws=len(rows),
        failures=sum(row.failed for row in rows),
        skipped=sum(row.verdict == "skipped" for row in rows),
    )
    return list(rows)


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.draw.p,
                row.draw.q,
                row.draw.L,
                row.m,
                "" if row.k is None else row.k,
                "" if row.flock_size is None else row.flock_size,
                row.verdict,
                "" if row.max_sidelobe is None else format_float(row.max_sidelobe),
                "" if row.max_pmepr is None else format_float(row.max_pmepr),
                row.note,
            ]
        )
    return buffer.getvalue()
