"""
EBF による任意長 GCS の構成

(p, L) から変数の数 m、L-1 の p 進桁 d、群の指数 k を導出し、
f と各 gamma in Z_p^k に対する剰余類関数 a^gamma を作って (q, p^k, L)-GCS を得る。
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from golay_gcs.ebf import (
    ComplexSequence,
    Ebf,
    ZqSequence,
    format_anf,
    p_ary_digits,
    project_zq,
    zq_to_complex,
)
from golay_gcs.errors import (
    ArgumentError,
    OutOfRangeError,
    ParameterError,
    UnsupportedParameterError,
)

logger = structlog.get_logger(__name__)

# ランダム生成時に g に使う単項式の最大数
MAX_RANDOM_G_MONOMIALS = 8


def infer_m(p: int, L: int) -> int:
    """p^{m-1} <= L < p^m を満たす唯一の m"""
    if p < 2:
        raise OutOfRangeError(f"p must be >= 2, got {p}")
    if L < 1:
        raise OutOfRangeError(f"L must be >= 1, got {L}")
    m = 1
    while p**m <= L:
        m += 1
    return m


def digits_of(p: int, L: int) -> Tuple[int, Tuple[int, ...]]:
    """(m, L-1 の p 進桁 (d_1, ..., d_m)) を返す"""
    m = infer_m(p, L)
    return m, p_ary_digits(L - 1, p, m)


def compute_k(digits: Sequence[int], p: int) -> int:
    """
    桁 (d_1, ..., d_m) から k を決める。

    - d_alpha = 0 (k' <= alpha <= m-1) となる最小の k' in {2, ..., m-1}
    - そのような k' がなく d_1..d_{m-1} がすべて p-1 なら 2
    - それ以外は m
    """
    m = len(digits)
    if m < 2:
        raise UnsupportedParameterError(
            "m>=2", f"the construction needs at least 2 variables, got m={m}"
        )
    for k in range(2, m):
        # 条件は k について上に閉じているので最初に見つかったものが最小
        if all(digits[alpha - 1] == 0 for alpha in range(k, m)):
            return k
    if all(d == p - 1 for d in digits[: m - 1]):
        return 2
    return m


def _validate_base(p: int, q: int, L: int) -> None:
    if p < 2:
        raise ParameterError("p>=2", f"p must be >= 2, got {p}")
    if q < 2 or q % p != 0:
        raise ParameterError("p|q", f"p={p} must divide q={q}")
    if L < p:
        raise UnsupportedParameterError(
            "L>=p", f"L={L} < p={p} gives m=1, which the construction does not support"
        )


@dataclass(frozen=True)
class GcsParams:
    """
    構成の自由パラメータ一式と導出量 (m, digits, k)。

    pi は {1, ..., m-1} 上の置換 (pi(1) = 1) を像の列 (pi(1), ..., pi(m-1)) で持つ。
    g は m-1 変数の EBF。省略時は pi = 恒等置換、g = 0、c = 0。
    検証順は p>=2 -> p|q -> L>=p -> pi -> c の長さ -> g の変数の数。
    """

    p: int
    q: int
    L: int
    pi: Optional[Tuple[int, ...]] = None
    g: Optional[Ebf] = None
    c: Optional[Tuple[int, ...]] = None
    c_prime: int = 0
    m: int = field(init=False)
    digits: Tuple[int, ...] = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        _validate_base(self.p, self.q, self.L)
        m, digits = digits_of(self.p, self.L)

        pi = tuple(range(1, m)) if self.pi is None else tuple(int(v) for v in self.pi)
        if sorted(pi) != list(range(1, m)):
            raise ParameterError(
                "pi", f"pi={pi} is not a permutation of {{1, ..., {m - 1}}}"
            )
        if pi[0] != 1:
            raise ParameterError("pi", f"pi(1) must be 1, got {pi[0]}")

        c = (0,) * m if self.c is None else tuple(int(v) % self.q for v in self.c)
        if len(c) != m:
            raise ParameterError("c", f"c has {len(c)} entries, expected m={m}")

        g = Ebf.zero(self.p, m - 1, self.q) if self.g is None else self.g
        if (g.p, g.q) != (self.p, self.q):
            raise ParameterError(
                "g", f"g is defined over (p={g.p}, q={g.q}), expected ({self.p}, {self.q})"
            )
        if g.m != m - 1:
            raise ParameterError("g", f"g has {g.m} variables, expected m-1={m - 1}")

        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "c_prime", int(self.c_prime) % self.q)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "k", compute_k(digits, self.p))

    @property
    def flock_size(self) -> int:
        return self.p**self.k

    @property
    def step(self) -> int:
        """q/p"""
        return self.q // self.p

    def summary(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "L": self.L,
            "m": self.m,
            "k": self.k,
            "digits": list(self.digits),
            "pi": list(self.pi),
            "c": list(self.c),
            "c_prime": self.c_prime,
            "g": format_anf(self.g),
        }


def g_term_active(params: GcsParams) -> bool:
    """
    g * prod_{l=0}^{d_m-1} (x_m - l) を f に含めるかどうか。

    積は x_m = d_m のブロックでのみ非零。そのブロック内で変化する桁がすべて
    gamma のオフセットで覆われる場合に限り項を残す。d_m = 0 なら積は空なので除く。
    """
    d_m = params.digits[-1]
    if d_m == 0:
        return False
    if params.k == params.m:
        return True
    return any(d != params.p - 1 for d in params.digits[:-1])


def build_f(params: GcsParams) -> Ebf:
    """f = (q/p) sum x_{pi(a)} x_{pi(a+1)} + g prod (x_m - l) + sum c_a x_a + c'"""
    p, m, q = params.p, params.m, params.q
    f = Ebf.constant(p, m, q, params.c_prime)

    for alpha in range(1, m - 1):
        exponent = [0] * m
        exponent[params.pi[alpha - 1] - 1] = 1
        exponent[params.pi[alpha] - 1] = 1
        f = f + Ebf.monomial(p, m, q, exponent, params.step)

    if g_term_active(params):
        lifted_g = Ebf(p, m, q, {e + (0,): c for e, c in params.g.items()})
        x_m = Ebf.variable(p, m, q, m)
        product = Ebf.constant(p, m, q, 1)
        for l in range(params.digits[-1]):
            product = product * (x_m - Ebf.constant(p, m, q, l))
        f = f + lifted_g * product
    elif not params.g.is_zero():
        logger.debug(
            "g term suppressed",
            digits=params.digits,
            k=params.k,
            g=format_anf(params.g),
        )

    for alpha, coeff in enumerate(params.c, start=1):
        f = f + Ebf.variable(p, m, q, alpha, coeff)
    return f


def build_coset(f: Ebf, gamma: Sequence[int], params: GcsParams) -> Ebf:
    """a^gamma = f + gamma_1 (q/p) x_{pi(1)} + (q/p) sum_{a=2}^{k-1} gamma_a x_a + gamma_k (q/p) x_m"""
    k, p, m, q = params.k, params.p, params.m, params.q
    gamma = tuple(int(v) for v in gamma)
    if len(gamma) != k:
        raise ArgumentError(f"gamma has {len(gamma)} entries, expected k={k}")
    if any(not 0 <= v < p for v in gamma):
        raise OutOfRangeError(f"gamma={gamma} is not in Z_{p}^{k}")

    step = params.step
    a = f + Ebf.variable(p, m, q, params.pi[0], gamma[0] * step)
    for alpha in range(2, k):
        a = a + Ebf.variable(p, m, q, alpha, gamma[alpha - 1] * step)
    return a + Ebf.variable(p, m, q, m, gamma[k - 1] * step)


@dataclass(frozen=True, eq=False)
class GcsMember:
    gamma: Tuple[int, ...]
    zq_seq: ZqSequence
    complex_seq: ComplexSequence


@dataclass(frozen=True, eq=False)
class GcsSet:
    """{psi_L(a^gamma) : gamma in Z_p^k}。members は gamma_1 が最も速く変わる辞書順"""

    params: GcsParams
    members: Tuple[GcsMember, ...]

    @property
    def flock_size(self) -> int:
        return len(self.members)

    @property
    def length(self) -> int:
        return self.params.L

    def zq_matrix(self) -> np.ndarray:
        return np.array([member.zq_seq.values for member in self.members], dtype=np.int64)

    def zq_sequences(self) -> List[ZqSequence]:
        return [member.zq_seq for member in self.members]

    def complex_sequences(self) -> List[ComplexSequence]:
        return [member.complex_seq for member in self.members]


def enumerate_gammas(p: int, k: int) -> List[Tuple[int, ...]]:
    """Z_p^k を gamma_1 が最も速く変わる順に列挙する"""
    return [p_ary_digits(r, p, k) for r in range(p**k)]


def coset_offsets(params: GcsParams) -> np.ndarray:
    """
    (k, L) 行列。行 a は gamma_a = 1 のときに a^gamma へ加わる Z_q 系列。

    a^gamma の値は phi_L(f) + gamma @ coset_offsets (mod q) で、build_coset と一致する。
    """
    p, m, q, k = params.p, params.m, params.q, params.k
    alphas = [params.pi[0], *range(2, k), m]
    return np.stack(
        [
            project_zq(Ebf.variable(p, m, q, alpha, params.step), params.L).as_array()
            for alpha in alphas
        ]
    )


def build_gcs(params: GcsParams) -> GcsSet:
    f = build_f(params)
    # f は一度だけ評価し、各 gamma ではオフセットを足すだけにする
    base = project_zq(f, params.L).as_array()
    offsets = coset_offsets(params)
    members = []
    for gamma in enumerate_gammas(params.p, params.k):
        values = (base + np.asarray(gamma, dtype=np.int64) @ offsets) % params.q
        zq_seq = ZqSequence(q=params.q, values=tuple(values.tolist()))
        members.append(GcsMember(gamma, zq_seq, zq_to_complex(zq_seq)))
    logger.debug(
        "GCS constructed",
        q=params.q,
        flock=len(members),
        length=params.L,
        m=params.m,
        k=params.k,
        f=format_anf(f),
    )
    return GcsSet(params=params, members=tuple(members))


def dedupe(gcs: GcsSet) -> GcsSet:
    """同一の Z_q 系列を取り除く (最初の出現を残す)"""
    seen = set()
    members = []
    for member in gcs.members:
        if member.zq_seq.values in seen:
            continue
        seen.add(member.zq_seq.values)
        members.append(member)
    if len(members) != len(gcs.members):
        logger.debug(
            "Duplicate members removed",
            before=len(gcs.members),
            after=len(members),
        )
    return GcsSet(params=gcs.params, members=tuple(members))


def random_params(p: int, q: int, L: int, rng: np.random.Generator) -> GcsParams:
    """pi (1 を固定)、g (高々 8 個の単項式)、c、c' を一様に選んだパラメータ"""
    _validate_base(p, q, L)
    m = infer_m(p, L)

    pi = (1, *(int(v) for v in rng.permutation(np.arange(2, m))))

    total = p ** (m - 1)
    count = int(rng.integers(0, min(MAX_RANDOM_G_MONOMIALS, total) + 1))
    chosen = rng.choice(total, size=count, replace=False) if count else []
    g_terms = {
        p_ary_digits(int(index), p, m - 1): int(rng.integers(0, q)) for index in chosen
    }
    g = Ebf(p, m - 1, q, g_terms)

    c = tuple(int(v) for v in rng.integers(0, q, size=m))
    c_prime = int(rng.integers(0, q))
    return GcsParams(p=p, q=q, L=L, pi=pi, g=g, c=c, c_prime=c_prime)


def example1_params(c_prime: int = 0) -> GcsParams:
    """長さ 19、アルファベット 4、群サイズ 16 の例 (f = x1x2 + 3x1x2x3 + c')"""
    g = Ebf(4, 2, 4, {(1, 1): 3})
    return GcsParams(p=4, q=4, L=19, pi=(1, 2), g=g, c=(0, 0, 0), c_prime=c_prime)
