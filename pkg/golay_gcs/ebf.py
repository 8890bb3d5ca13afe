"""
拡張ブール関数 (EBF) の代数的正規形 (ANF) 表現と、系列への射影

EBF は Z_p^m -> Z_q の関数で、単項式の Z_q 線形結合として保持する。
指数ベクトル (e_1, ..., e_m) -> 係数 の辞書で、係数 0 の項は保持しない。
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from golay_gcs.errors import ArgumentError, OutOfRangeError, ParseError

logger = structlog.get_logger(__name__)

Exponent = Tuple[int, ...]

# ComplexSequence の単位円判定に使う許容誤差
UNIT_MODULUS_TOLERANCE = 1e-12


@lru_cache(maxsize=None)
def root_of_unity_table(q: int) -> np.ndarray:
    """zeta_q^e (e = 0..q-1) の表。角度 2*pi*e/q から単位円上の点として計算する"""
    if q < 1:
        raise OutOfRangeError(f"q must be >= 1, got {q}")
    table = np.exp(2j * np.pi * np.arange(q) / q)
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class ZqSequence:
    """Z_q 上の長さ L の系列 (phi_L(f) など)"""

    q: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise OutOfRangeError(f"q must be >= 2, got {self.q}")
        values = tuple(int(v) for v in self.values)
        if not values:
            raise OutOfRangeError("sequence length must be >= 1")
        for index, v in enumerate(values):
            if not 0 <= v < self.q:
                raise OutOfRangeError(
                    f"entry {index} = {v} is not reduced mod {self.q}"
                )
        object.__setattr__(self, "values", values)

    @classmethod
    def reduced(cls, q: int, values: Iterable[int]) -> "ZqSequence":
        """各要素を mod q で簡約してから生成する"""
        return cls(q=q, values=tuple(int(v) % q for v in values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class ComplexSequence:
    """単位円上の複素数からなる系列 (psi_L(f))"""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128).reshape(-1)
        if values.size == 0:
            raise OutOfRangeError("sequence length must be >= 1")
        deviation = np.max(np.abs(np.abs(values) - 1.0))
        if deviation > UNIT_MODULUS_TOLERANCE:
            raise ArgumentError(
                f"entries must have unit modulus (max deviation {deviation:.3e})"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexSequence):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.all(self.values == other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def zq_to_complex(seq: ZqSequence) -> ComplexSequence:
    """任意の Z_q 系列に psi (zeta_q の冪) を適用する"""
    return ComplexSequence(root_of_unity_table(seq.q)[seq.as_array()])


def p_ary_digits(i: int, p: int, m: int) -> Tuple[int, ...]:
    """
    整数 i の p 進表現 (i_1, ..., i_m) を返す。i_1 が最下位桁 (リトルエンディアン)。

    i = sum_{l=1}^{m} i_l * p^{l-1}
    """
    if p < 2:
        raise OutOfRangeError(f"base p must be >= 2, got {p}")
    if m < 0:
        raise OutOfRangeError(f"width m must be >= 0, got {m}")
    if not 0 <= i < p**m:
        raise OutOfRangeError(f"{i} is outside [0, {p}^{m})")
    digits = []
    for _ in range(m):
        i, digit = divmod(i, p)
        digits.append(digit)
    return tuple(digits)


def _digit_matrix(length: int, p: int, m: int) -> np.ndarray:
    """インデックス 0..length-1 の p 進桁を (length, m) の行列で返す"""
    indices = np.arange(length, dtype=np.int64)
    return np.stack([(indices // p**l) % p for l in range(m)], axis=1)


class Ebf:
    """
    拡張ブール関数 f: Z_p^m -> Z_q を ANF (指数ベクトル -> 係数) で保持する不変オブジェクト。

    指数は書かれたまま保持する (x^p の簡約はしない)。評価時に x^e mod q を直接計算するため、
    乗算で p 以上の指数が現れても値表としては well-defined。
    """

    __slots__ = ("p", "m", "q", "_terms")

    def __init__(
        self, p: int, m: int, q: int, terms: Optional[Mapping[Exponent, int]] = None
    ):
        if p < 2:
            raise OutOfRangeError(f"p must be >= 2, got {p}")
        if m < 1:
            raise OutOfRangeError(f"m must be >= 1, got {m}")
        if q < 2:
            raise OutOfRangeError(f"q must be >= 2, got {q}")
        normalized: Dict[Exponent, int] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != m:
                raise ArgumentError(
                    f"exponent vector {exponent} has length {len(exponent)}, expected {m}"
                )
            if any(e < 0 for e in exponent):
                raise OutOfRangeError(f"negative exponent in {exponent}")
            value = (normalized.get(exponent, 0) + int(coeff)) % q
            if value:
                normalized[exponent] = value
            else:
                normalized.pop(exponent, None)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "_terms", dict(sorted(normalized.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Ebf is immutable")

    # 生成ヘルパー
    @classmethod
    def zero(cls, p: int, m: int, q: int) -> "Ebf":
        return cls(p, m, q)

    @classmethod
    def constant(cls, p: int, m: int, q: int, value: int) -> "Ebf":
        return cls(p, m, q, {(0,) * m: value})

    @classmethod
    def monomial(cls, p: int, m: int, q: int, exponent: Sequence[int], coeff: int = 1):
        exponent = tuple(exponent)
        if any(not 0 <= e < p for e in exponent):
            raise OutOfRangeError(f"monomial exponents {exponent} must lie in [0, {p - 1}]")
        return cls(p, m, q, {exponent: coeff})

    @classmethod
    def variable(cls, p: int, m: int, q: int, alpha: int, coeff: int = 1) -> "Ebf":
        """x_alpha (alpha は 1 始まり) に係数を掛けた単項式"""
        if not 1 <= alpha <= m:
            raise OutOfRangeError(f"variable index {alpha} outside [1, {m}]")
        exponent = [0] * m
        exponent[alpha - 1] = 1
        return cls(p, m, q, {tuple(exponent): coeff})

    @property
    def terms(self) -> Dict[Exponent, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, int]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ebf):
            return NotImplemented
        return (self.p, self.m, self.q, self._terms) == (
            other.p,
            other.m,
            other.q,
            other._terms,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.q, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"Ebf(p={self.p}, m={self.m}, q={self.q}, anf={format_anf(self)!r})"

    def __add__(self, other: "Ebf") -> "Ebf":
        return add(self, other)

    def __sub__(self, other: "Ebf") -> "Ebf":
        return subtract(self, other)

    def __neg__(self) -> "Ebf":
        return negate(self)

    def __mul__(self, other):
        if isinstance(other, Ebf):
            return multiply(self, other)
        return scale(self, int(other))

    __rmul__ = __mul__

    def __call__(self, *x: int) -> int:
        return evaluate(self, x)


def _check_compatible(f: Ebf, g: Ebf) -> None:
    if (f.p, f.m, f.q) != (g.p, g.m, g.q):
        raise ArgumentError(
            f"operands differ in (p, m, q): {(f.p, f.m, f.q)} vs {(g.p, g.m, g.q)}"
        )


def evaluate(f: Ebf, x: Sequence[int]) -> int:
    """点 x in Z_p^m における f の値 (mod q)。0^0 = 1 とする"""
    if len(x) != f.m:
        raise ArgumentError(f"point has {len(x)} coordinates, expected {f.m}")
    for coordinate in x:
        if not 0 <= coordinate < f.p:
            raise OutOfRangeError(f"coordinate {coordinate} outside Z_{f.p}")
    total = 0
    for exponent, coeff in f.items():
        term = coeff
        for value, e in zip(x, exponent):
            term = (term * pow(value, e, f.q)) % f.q
        total += term
    return total % f.q


def add(f: Ebf, g: Ebf) -> Ebf:
    _check_compatible(f, g)
    terms = f.terms
    for exponent, coeff in g.items():
        terms[exponent] = terms.get(exponent, 0) + coeff
    return Ebf(f.p, f.m, f.q, terms)


def scale(f: Ebf, s: int) -> Ebf:
    return Ebf(f.p, f.m, f.q, {e: c * s for e, c in f.items()})


def negate(f: Ebf) -> Ebf:
    return scale(f, f.q - 1)


def subtract(f: Ebf, g: Ebf) -> Ebf:
    return add(f, negate(g))


def multiply(f: Ebf, g: Ebf) -> Ebf:
    """記号的な積。指数は成分ごとの和をそのまま保持する"""
    _check_compatible(f, g)
    terms: Dict[Exponent, int] = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            exponent = tuple(a + b for a, b in zip(e1, e2))
            terms[exponent] = terms.get(exponent, 0) + c1 * c2
    return Ebf(f.p, f.m, f.q, terms)


def _evaluate_range(f: Ebf, length: int) -> np.ndarray:
    """インデックス 0..length-1 の p 進表現で f をまとめて評価する"""
    digits = _digit_matrix(length, f.p, f.m)
    values = np.zeros(length, dtype=np.int64)
    for exponent, coeff in f.items():
        term = np.full(length, coeff, dtype=np.int64)
        for alpha, e in enumerate(exponent):
            if e == 0:
                continue
            powers = np.array([pow(x, e, f.q) for x in range(f.p)], dtype=np.int64)
            term = (term * powers[digits[:, alpha]]) % f.q
        values = (values + term) % f.q
    return values


def _check_length(f: Ebf, length: int) -> None:
    if not 1 <= length <= f.p**f.m:
        raise OutOfRangeError(f"length {length} outside [1, {f.p}^{f.m}]")


def project_zq(f: Ebf, length: int) -> ZqSequence:
    """phi_L(f): 値表の先頭 L 要素 (末尾 p^m - L 要素を削除)"""
    _check_length(f, length)
    return ZqSequence(q=f.q, values=tuple(_evaluate_range(f, length).tolist()))


def project_complex(f: Ebf, length: int) -> ComplexSequence:
    """psi_L(f): phi_L(f) の各要素 e を zeta_q^e に写す"""
    return zq_to_complex(project_zq(f, length))


def evaluation_table(f: Ebf) -> ZqSequence:
    return project_zq(f, f.p**f.m)


def format_anf(f: Ebf) -> str:
    """ANF テキスト形式 `coeff:e1,...,em;...` (指数ベクトルの辞書順)。零関数は 0 と書く"""
    if f.is_zero():
        return "0"
    return ";".join(
        f"{coeff}:{','.join(str(e) for e in exponent)}"
        for exponent, coeff in f.items()
    )


def parse_anf(text: str, p: int, m: int, q: int) -> Ebf:
    """ANF テキスト形式を解析する。空文字列と "0" は零関数"""
    stripped = text.strip()
    if stripped in ("", "0"):
        return Ebf.zero(p, m, q)

    terms: Dict[Exponent, int] = {}
    for index, raw_term in enumerate(stripped.split(";")):
        raw_term = raw_term.strip()
        if not raw_term:
            continue
        coeff_text, sep, exponent_text = raw_term.partition(":")
        if not sep:
            raise ParseError(
                f"term {raw_term!r} is missing ':'", field=f"term {index + 1}"
            )
        try:
            coeff = int(coeff_text)
            exponent = tuple(int(e) for e in exponent_text.split(","))
        except ValueError:
            raise ParseError(
                f"term {raw_term!r} is not of the form coeff:e1,...,em",
                field=f"term {index + 1}",
            ) from None
        if len(exponent) != m:
            raise ParseError(
                f"term {raw_term!r} has {len(exponent)} exponents, expected {m}",
                field=f"term {index + 1}",
            )
        if any(not 0 <= e < p for e in exponent):
            raise ParseError(
                f"term {raw_term!r} has exponents outside [0, {p - 1}]",
                field=f"term {index + 1}",
            )
        terms[exponent] = terms.get(exponent, 0) + coeff

    f = Ebf(p, m, q, terms)
    logger.debug("ANF parsed", anf=format_anf(f), p=p, m=m, q=q)
    return f
