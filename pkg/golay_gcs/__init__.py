"""
golay-gcs: 拡張ブール関数による任意長 Golay 相補系列集合 (GCS) の構成と検証

(p, q, L) と自由パラメータ (pi, g, c, c') から (q, p^k, L)-GCS を作り、
非周期自己相関の和と PMEPR を独立な参照実装と突き合わせて確認します。
"""

# 主要な API を再エクスポート
from golay_gcs.construct import GcsParams, GcsSet, build_gcs, dedupe, example1_params
from golay_gcs.correlation import aacf, aacf_sum, accf, is_gcs
from golay_gcs.ebf import Ebf, ZqSequence, format_anf, parse_anf, project_complex
from golay_gcs.errors import GcsError, ParameterError
from golay_gcs.pmepr import pmepr, pmepr_report

__version__ = "0.1.0"

__all__ = [
    "Ebf",
    "GcsError",
    "GcsParams",
    "GcsSet",
    "ParameterError",
    "ZqSequence",
    "aacf",
    "aacf_sum",
    "accf",
    "build_gcs",
    "dedupe",
    "example1_params",
    "format_anf",
    "is_gcs",
    "parse_anf",
    "pmepr",
    "pmepr_report",
    "project_complex",
]
