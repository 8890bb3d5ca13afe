"""
入出力形式

- GCS は JSON (`{p,q,L,m,k,digits,pi,c,c_prime,g,members:[{gamma,seq}]}`)
- 行列・相関プロファイル・PMEPR・スイープ結果は CSV
浮動小数点は小数点以下 12 桁で出力する (-0 は 0 に正規化)。
"""

import csv
import io
import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError

from golay_gcs.construct import GcsSet
from golay_gcs.correlation import CorrelationProfile
from golay_gcs.ebf import ZqSequence
from golay_gcs.errors import OutOfRangeError, ParseError
from golay_gcs.pmepr import PmeprReport


def format_float(value: float) -> str:
    # round 後に 0.0 を足して -0.0 を 0.0 にする
    return f"{round(float(value), 12) + 0.0:.12f}"


def profile_to_csv(profile: CorrelationProfile) -> str:
    lines = ["tau,real,imag"]
    for tau, value in profile.items():
        lines.append(f"{tau},{format_float(value.real)},{format_float(value.imag)}")
    return "\n".join(lines) + "\n"


def matrix_to_csv(rows: Sequence[Sequence[int]]) -> str:
    return "".join(",".join(str(int(v)) for v in row) + "\n" for row in rows)


def pmepr_report_to_csv(report: PmeprReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["member_index", "gamma", "pmepr"])
    for index, (gamma, value) in enumerate(zip(report.gammas, report.values)):
        label = "" if gamma is None else ",".join(str(v) for v in gamma)
        writer.writerow([index, label, format_float(value)])
    return buffer.getvalue()


class MemberDocument(BaseModel):
    gamma: Optional[List[int]] = None
    seq: List[int] = Field(..., min_length=1)


class GcsDocument(BaseModel):
    """generate の出力。verify / pmepr の入力としては q と members だけが必須"""

    p: Optional[int] = None
    q: int = Field(..., ge=2)
    L: Optional[int] = None
    m: Optional[int] = None
    k: Optional[int] = None
    digits: Optional[List[int]] = None
    pi: Optional[List[int]] = None
    c: Optional[List[int]] = None
    c_prime: Optional[int] = None
    g: Optional[str] = None
    members: List[MemberDocument] = Field(..., min_length=1)


def gcs_to_document(gcs: GcsSet) -> GcsDocument:
    return GcsDocument(
        **gcs.params.summary(),
        members=[
            MemberDocument(gamma=list(member.gamma), seq=list(member.zq_seq.values))
            for member in gcs.members
        ],
    )


def gcs_to_json(gcs: GcsSet) -> str:
    return json.dumps(gcs_to_document(gcs).model_dump(), indent=2) + "\n"


LoadedSet = Tuple[int, List[ZqSequence], List[Optional[Tuple[int, ...]]]]


def _to_sequences(
    rows: Sequence[Sequence[int]], q: int, line_numbers: Optional[Sequence[int]] = None
) -> List[ZqSequence]:
    sequences = []
    expected = len(rows[0])
    for index, row in enumerate(rows):
        line = line_numbers[index] if line_numbers else None
        field = None if line_numbers else f"members[{index}].seq"
        if len(row) != expected:
            raise ParseError(
                f"ragged rows: expected {expected} symbols, got {len(row)}",
                line=line,
                field=field,
            )
        try:
            sequences.append(ZqSequence(q=q, values=tuple(row)))
        except OutOfRangeError as e:
            raise ParseError(str(e), line=line, field=field) from None
    return sequences


def parse_json_set(text: str) -> LoadedSet:
    try:
        document = GcsDocument.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ParseError(first["msg"], field=location or None) from None
    rows = [member.seq for member in document.members]
    gammas = [
        tuple(member.gamma) if member.gamma is not None else None
        for member in document.members
    ]
    return document.q, _to_sequences(rows, document.q), gammas


def parse_csv_set(text: str, q: int) -> LoadedSet:
    rows: List[List[int]] = []
    line_numbers: List[int] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        row = []
        for column, cell in enumerate(line.split(","), start=1):
            try:
                row.append(int(cell))
            except ValueError:
                raise ParseError(
                    f"{cell.strip()!r} is not an integer",
                    line=line_number,
                    field=str(column),
                ) from None
        rows.append(row)
        line_numbers.append(line_number)
    if not rows:
        raise ParseError("no sequences found")
    return q, _to_sequences(rows, q, line_numbers), [None] * len(rows)


def load_set(path: Path, q: Optional[int] = None) -> LoadedSet:
    """JSON (拡張子 .json) か CSV の系列集合を読み込む。CSV では q の指定が必要"""
    text = Path(path).read_text(encoding="utf-8")
    if Path(path).suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_json_set(text)
    if q is None:
        raise ParseError("CSV input needs --q (alphabet size)", field="q")
    return parse_csv_set(text, q)
