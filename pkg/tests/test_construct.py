from dataclasses import replace

import numpy as np
import pytest
import structlog

from golay_gcs.construct import (
    GcsParams,
    build_coset,
    build_f,
    build_gcs,
    compute_k,
    coset_offsets,
    dedupe,
    digits_of,
    enumerate_gammas,
    example1_params,
    g_term_active,
    infer_m,
    random_params,
)
from golay_gcs.correlation import aacf_profile, is_gcs
from golay_gcs.ebf import Ebf, format_anf, parse_anf, project_complex, project_zq
from golay_gcs.errors import (
    ArgumentError,
    OutOfRangeError,
    ParameterError,
    UnsupportedParameterError,
)
from golay_gcs.logging_config import configure_logging
from golay_gcs.oracle import direct_example1, verify_set_exact

configure_logging("debug")
logger = structlog.get_logger(__name__)

TABLE_ROW_1 = (0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 0, 3, 2, 1, 0, 0, 0)
TABLE_ROW_2 = (0, 1, 2, 3, 0, 2, 0, 2, 0, 3, 2, 1, 0, 0, 0, 0, 0, 1, 2)
TABLE_ROW_5 = (0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 0, 3, 2, 1, 1, 1, 1)
TABLE_ROW_16 = (0, 3, 2, 1, 0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 3, 2, 1)


@pytest.fixture
def example1():
    """長さ 19 の例のパラメータ (c' = 0)"""
    return example1_params()


@pytest.fixture
def example1_set(example1):
    return build_gcs(example1)


@pytest.mark.parametrize("p, L, expected", [(4, 19, 3), (2, 8, 4), (3, 1, 1), (2, 7, 3)])
def test_infer_m(p, L, expected):
    """変数の数 m の導出のテスト"""
    logger.info("テストケース: m の導出", p=p, L=L)
    assert infer_m(p, L) == expected


def test_infer_m_bracket_holds():
    """p^{m-1} <= L < p^m が常に成り立つかのテスト"""
    logger.info("テストケース: p in {2, 3, 5}, L < 200")
    for p in (2, 3, 5):
        for L in range(1, 200):
            m = infer_m(p, L)
            assert p ** (m - 1) <= L < p**m


def test_digits_of_example():
    """L - 1 = 18 の 4 進桁のテスト"""
    logger.info("テストケース: 18 = 2 + 0*4 + 1*16")
    assert digits_of(4, 19) == (3, (2, 0, 1))


@pytest.mark.parametrize(
    "digits, p, expected",
    [
        ((2, 0, 1), 4, 2),
        ((1, 1, 1, 0), 2, 2),
        ((0, 1, 1), 2, 3),
        ((2, 2, 0), 3, 2),
        ((1, 0, 0, 0, 2), 3, 2),
        ((1, 2, 0, 0, 2), 3, 3),
    ],
)
def test_compute_k(digits, p, expected):
    """桁ベクトルから k を決める規則のテスト"""
    logger.info("テストケース: k の規則", digits=digits, p=p)
    assert compute_k(digits, p) == expected


def test_compute_k_consistent_over_all_lengths():
    """p in {2..5}, L in [p, 300) の全長さで k の規則が矛盾しないかのテスト"""
    logger.info("テストケース: compute_k の全域確認")
    for p in range(2, 6):
        for L in range(p, 300):
            m, digits = digits_of(p, L)
            k = compute_k(digits, p)
            assert 2 <= k <= m
            if k == m or all(d == p - 1 for d in digits[: m - 1]):
                continue
            # 末尾の桁 d_k..d_{m-1} が 0 で、k はその最小値
            assert all(d == 0 for d in digits[k - 1 : m - 1])
            assert k == 2 or digits[k - 2] != 0


def test_compute_k_rejects_single_variable():
    """m = 1 の桁ベクトルのテスト"""
    logger.info("テストケース: m = 1")
    with pytest.raises(UnsupportedParameterError):
        compute_k((1,), 3)


@pytest.mark.parametrize(
    "kwargs, constraint",
    [
        ({"p": 1, "q": 4, "L": 9}, "p>=2"),
        ({"p": 3, "q": 4, "L": 9}, "p|q"),
        ({"p": 4, "q": 4, "L": 3}, "L>=p"),
        ({"p": 4, "q": 4, "L": 19, "pi": (2, 1)}, "pi"),
        ({"p": 2, "q": 2, "L": 8, "pi": (1, 2, 2)}, "pi"),
        ({"p": 4, "q": 4, "L": 19, "c": (0, 0)}, "c"),
        ({"p": 4, "q": 4, "L": 19, "g": Ebf.zero(4, 3, 4)}, "g"),
        ({"p": 4, "q": 4, "L": 19, "g": Ebf.zero(4, 2, 8)}, "g"),
    ],
)
def test_params_validation_reports_constraint(kwargs, constraint):
    """検証エラーが失敗した制約を示すかのテスト"""
    logger.info("テストケース: パラメータ検証", constraint=constraint)
    with pytest.raises(ParameterError) as excinfo:
        GcsParams(**kwargs)
    assert excinfo.value.constraint == constraint


def test_params_validation_order():
    """p | q が L >= p より先に報告されるかのテスト"""
    logger.info("テストケース: 検証の順序")
    with pytest.raises(ParameterError) as excinfo:
        GcsParams(p=3, q=4, L=2)
    assert excinfo.value.constraint == "p|q"
    with pytest.raises(ParameterError) as excinfo:
        GcsParams(p=4, q=4, L=19, pi=(2, 1), c=(0,), g=Ebf.zero(4, 1, 4))
    assert excinfo.value.constraint == "pi"


def test_params_small_length_is_unsupported():
    """L < p (m = 1) がサポート外になるかのテスト"""
    logger.info("テストケース: L < p")
    with pytest.raises(UnsupportedParameterError):
        GcsParams(p=5, q=5, L=4)


def test_params_defaults_and_derived(example1):
    """既定値と導出量のテスト"""
    logger.info("テストケース: 既定値と導出量")
    assert (example1.m, example1.digits, example1.k) == (3, (2, 0, 1), 2)
    assert example1.flock_size == 16
    assert example1.step == 1
    defaults = GcsParams(p=2, q=4, L=8)
    assert defaults.pi == (1, 2, 3)
    assert defaults.c == (0, 0, 0, 0)
    assert defaults.g.is_zero()
    assert example1.summary()["g"] == "3:1,1"


def test_build_f_example():
    """例の f のテスト"""
    logger.info("テストケース: c' = 1 で f = x1x2 + 3x1x2x3 + 1")
    f = build_f(example1_params(c_prime=1))
    assert f == parse_anf("1:1,1,0;3:1,1,1;1:0,0,0", 4, 3, 4)


def test_build_f_all_zero_parameters():
    """m = 2 で全パラメータが 0 なら f = 0 になるかのテスト"""
    logger.info("テストケース: f = 0")
    assert build_f(GcsParams(p=3, q=3, L=5)).is_zero()


def test_build_f_k2_path_has_no_g_term():
    """d_m = 0 のとき g の項が入らないかのテスト"""
    logger.info("テストケース: (p=2, q=4, L=8) の f")
    params = GcsParams(
        p=2, q=4, L=8, g=Ebf(2, 3, 4, {(1, 1, 1): 1}), c=(1, 0, 3, 2), c_prime=1
    )
    assert params.digits == (1, 1, 1, 0)
    assert not g_term_active(params)
    expected = Ebf(
        2,
        4,
        4,
        {
            (1, 1, 0, 0): 2,
            (0, 1, 1, 0): 2,
            (1, 0, 0, 0): 1,
            (0, 0, 1, 0): 3,
            (0, 0, 0, 1): 2,
            (0, 0, 0, 0): 1,
        },
    )
    assert build_f(params) == expected


def test_build_f_follows_permutation():
    """二次項が置換 pi に従うかのテスト"""
    logger.info("テストケース: pi = (1, 3, 2, 4)")
    params = GcsParams(p=2, q=2, L=16, pi=(1, 3, 2, 4))
    # x1x3 + x3x2 + x2x4
    assert format_anf(build_f(params)) == "1:0,1,0,1,0;1:0,1,1,0,0;1:1,0,1,0,0"


def test_g_term_guard_on_complete_last_block():
    """最後のブロックが完全で k < m のとき g の項を除く必要があるかのテスト"""
    logger.info("テストケース: (p=3, q=3, L=18), g = x1^2 x2")
    # L = 18, p = 3: d = (2, 2, 1)、最後のブロックは完全で k = 2 < m
    params = GcsParams(p=3, q=3, L=18, g=Ebf(3, 2, 3, {(2, 1): 1}))
    assert params.k == 2
    assert not g_term_active(params)
    assert is_gcs(build_gcs(params).complex_sequences()).passed

    # g x3 (d_m = 1 なので積は x3 だけ) を入れると GCS にならない
    unguarded = build_f(params) + Ebf(3, 3, 3, {(2, 1, 1): 1})
    sequences = [
        project_complex(build_coset(unguarded, gamma, params), params.L)
        for gamma in enumerate_gammas(params.p, params.k)
    ]
    assert not is_gcs(sequences).passed


def test_build_coset_table_rows(example1):
    """gamma = 0 と gamma_1 = 1 の剰余類関数のテスト"""
    logger.info("テストケース: 剰余類関数")
    f = build_f(example1)
    assert build_coset(f, (0, 0), example1) == f
    assert build_coset(f, (1, 0), example1).terms[(1, 0, 0)] == 1


def test_build_coset_validation(example1):
    """gamma の長さと範囲の検証のテスト"""
    logger.info("テストケース: 不正な gamma")
    f = build_f(example1)
    with pytest.raises(ArgumentError):
        build_coset(f, (0, 0, 0), example1)
    with pytest.raises(OutOfRangeError):
        build_coset(f, (4, 0), example1)


def test_enumerate_gammas_order():
    """gamma_1 が最も速く変わるかのテスト"""
    logger.info("テストケース: Z_2^2 の列挙順")
    assert enumerate_gammas(2, 2) == [(0, 0), (1, 0), (0, 1), (1, 1)]


@pytest.mark.parametrize("seed", range(8))
def test_build_gcs_matches_coset_functions(seed):
    """オフセット加算による構成が各剰余類関数の射影と一致するかのテスト"""
    logger.info("テストケース: build_gcs と build_coset の一致", seed=seed)
    rng = np.random.default_rng(400 + seed)
    p = int(rng.choice([2, 3, 4, 5]))
    params = random_params(p, p * int(rng.choice([1, 2, 3])), int(rng.integers(p, 130)), rng)
    gcs = build_gcs(params)
    f = build_f(params)
    assert coset_offsets(params).shape == (params.k, params.L)
    for member in gcs.members:
        assert member.zq_seq == project_zq(build_coset(f, member.gamma, params), params.L)


def test_build_gcs_example_table(example1_set):
    """16 x 19 の表の再現のテスト"""
    logger.info("テストケース: 16 x 19 の表の再現")
    matrix = example1_set.zq_matrix()
    assert matrix.shape == (16, 19)
    assert tuple(matrix[0]) == TABLE_ROW_1
    assert tuple(matrix[1]) == TABLE_ROW_2
    assert tuple(matrix[4]) == TABLE_ROW_5
    assert tuple(matrix[15]) == TABLE_ROW_16
    assert matrix.tolist() == direct_example1()
    assert example1_set.members[4].gamma == (0, 1)


def test_build_gcs_example_is_gcs(example1_set):
    """例の集合が GCS であるかのテスト"""
    logger.info("テストケース: 例の集合の判定")
    verdict = is_gcs(example1_set.complex_sequences())
    assert verdict.passed
    assert verdict.peak == pytest.approx(304)
    assert verify_set_exact(example1_set.zq_sequences())


def test_constant_offset_shifts_entries_and_keeps_aacf():
    """c' を変えると全要素が c' だけずれ、各系列の自己相関は変わらないかのテスト"""
    logger.info("テストケース: (p=3, q=6, L=23) で c' = 0 と c' = 5")
    base = replace(random_params(3, 6, 23, np.random.default_rng(13)), c_prime=0)
    shifted = replace(base, c_prime=5)
    base_set, shifted_set = build_gcs(base), build_gcs(shifted)
    difference = (shifted_set.zq_matrix() - base_set.zq_matrix()) % 6
    assert (difference == 5).all()
    for a, b in zip(base_set.complex_sequences(), shifted_set.complex_sequences()):
        np.testing.assert_allclose(
            aacf_profile(a).values, aacf_profile(b).values, atol=1e-12
        )
    assert is_gcs(shifted_set.complex_sequences()).passed


def test_build_gcs_with_constant_offset_is_still_gcs():
    """例の集合に c' = 1 を加えても GCS であるかのテスト"""
    logger.info("テストケース: 例の集合と c' = 1")
    gcs = build_gcs(example1_params(c_prime=1))
    expected = (build_gcs(example1_params()).zq_matrix() + 1) % 4
    assert gcs.zq_matrix().tolist() == expected.tolist()
    assert is_gcs(gcs.complex_sequences()).passed


def test_build_gcs_length_seven_binary():
    """L = 7, p = 2 で k = m = 3 になるかのテスト"""
    logger.info("テストケース: (p=2, q=2, L=7)")
    params = GcsParams(p=2, q=2, L=7)
    gcs = build_gcs(params)
    assert params.k == 3
    assert gcs.flock_size == 8
    assert verify_set_exact(gcs.zq_sequences())


def test_dedupe_collapses_ternary_power_length_set():
    """L = p^{m-1} の三値集合が 9 本から 3 本に縮むかのテスト"""
    logger.info("テストケース: (p=3, q=3, L=9) で 9 -> 3")
    gcs = build_gcs(GcsParams(p=3, q=3, L=9))
    assert gcs.flock_size == 9
    distinct = dedupe(gcs)
    assert distinct.flock_size == 3
    assert is_gcs(distinct.complex_sequences()).passed


def test_dedupe_six_ary_power_length_set():
    """L = p^{m-1} の六値集合が 9 本から 3 本に縮むかのテスト"""
    logger.info("テストケース: (p=3, q=6, L=9) で 9 -> 3")
    rng = np.random.default_rng(11)
    params = random_params(3, 6, 9, rng)
    gcs = build_gcs(params)
    assert gcs.flock_size == 9
    distinct = dedupe(gcs)
    assert distinct.flock_size == 3
    assert is_gcs(distinct.complex_sequences()).passed


def test_dedupe_binary_pair_is_exact():
    """重複除去後の二値対が厳密に GCS であるかのテスト"""
    logger.info("テストケース: (p=2, q=2, L=8) で 4 -> 2")
    params = random_params(2, 2, 8, np.random.default_rng(7))
    distinct = dedupe(build_gcs(params))
    assert distinct.flock_size == 2
    assert verify_set_exact(distinct.zq_sequences())


def test_dedupe_keeps_distinct_set(example1_set):
    """重複のない集合がそのまま残るかのテスト"""
    logger.info("テストケース: 例の集合の重複除去")
    distinct = dedupe(example1_set)
    assert distinct.flock_size == 16
    assert distinct.zq_matrix().tolist() == example1_set.zq_matrix().tolist()


def test_length_two_binary_pair():
    """長さ 2 の二値対のテスト"""
    logger.info("テストケース: (p=2, q=2, L=2)")
    distinct = dedupe(build_gcs(GcsParams(p=2, q=2, L=2)))
    assert [s.values for s in distinct.zq_sequences()] == [(0, 0), (0, 1)]


def test_random_params_are_reproducible():
    """同じシードで同じパラメータが得られるかのテスト"""
    logger.info("テストケース: シードの再現性")
    first = random_params(5, 10, 130, np.random.default_rng(3))
    second = random_params(5, 10, 130, np.random.default_rng(3))
    assert first == second
    assert first.pi[0] == 1
    assert sorted(first.pi) == list(range(1, first.m))
    assert len(first.g) <= 8


@pytest.mark.parametrize("seed", range(12))
def test_random_params_build_gcs(seed):
    """ランダムなパラメータから GCS が得られるかのテスト"""
    logger.info("テストケース: ランダムなパラメータ", seed=seed)
    rng = np.random.default_rng(seed)
    p = int(rng.choice([2, 3, 4, 5]))
    q = p * int(rng.choice([1, 2, 3]))
    L = int(rng.integers(p, 120))
    params = random_params(p, q, L, rng)
    gcs = build_gcs(params)
    assert gcs.flock_size == p**params.k
    assert gcs.length == L
    assert is_gcs(gcs.complex_sequences()).passed
