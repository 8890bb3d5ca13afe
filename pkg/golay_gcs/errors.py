"""golay-gcs の例外階層"""

from typing import Optional


class GcsError(Exception):
    """golay-gcs が送出する例外の基底クラス"""


class ArgumentError(GcsError, ValueError):
    """引数の次元・形状・パラメータ (p, m, q) の不一致"""


class OutOfRangeError(GcsError, ValueError):
    """インデックス、長さ、桁が許容範囲外"""


class ParameterError(GcsError, ValueError):
    """構成パラメータの検証エラー。どの制約で失敗したかを constraint に保持する"""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint
        self.message = message


class UnsupportedParameterError(ParameterError):
    """形式上は正しいが構成がサポートしないパラメータ (m < 2 など)"""


class SearchSpaceError(GcsError):
    """全探索の探索空間が上限を超えた"""


class ParseError(GcsError, ValueError):
    """ANF テキストや入力ファイルの解析エラー"""

    def __init__(
        self, message: str, line: Optional[int] = None, field: Optional[str] = None
    ):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field {field}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field
