import numpy as np
import pytest
import structlog

from golay_gcs.construct import GcsParams, build_gcs, dedupe, example1_params
from golay_gcs.correlation import accf
from golay_gcs.ebf import ComplexSequence, ZqSequence, zq_to_complex
from golay_gcs.errors import ArgumentError, SearchSpaceError
from golay_gcs.logging_config import configure_logging
from golay_gcs.oracle import (
    compare_accf,
    direct_example1,
    exhaustive_tiny_search,
    naive_accf,
    naive_accf_exact,
    naive_is_gcs,
    verify_set_exact,
)

configure_logging("debug")
logger = structlog.get_logger(__name__)


def _seq(*values) -> ComplexSequence:
    return ComplexSequence(np.array(values, dtype=np.complex128))


def test_naive_accf_examples():
    """ループによる相関の値のテスト"""
    logger.info("テストケース: (1, 1, 1, -1) の相関")
    a = _seq(1, 1, 1, -1)
    assert naive_accf(a, a, 1) == pytest.approx(1)
    assert naive_accf(a, a, 0) == pytest.approx(4)
    assert naive_accf(a, a, 4) == 0
    assert naive_accf(a, a, -5) == 0


def test_naive_accf_matches_library_on_negative_shift():
    """負のシフトを含む全シフトでライブラリと一致するかのテスト"""
    logger.info("テストケース: 長さ 5 の複素系列")
    a = _seq(1, 1j, -1, -1j, 1)
    b = _seq(-1, 1, 1j, 1, -1j)
    for tau in range(-5, 6):
        assert abs(naive_accf(a, b, tau) - accf(a, b, tau)) <= 1e-12


def test_compare_accf_thousand_cases():
    """ランダムな 1000 組でライブラリとループ実装を比較するテスト"""
    logger.info("テストケース: 1000 組の (a, b, tau) でライブラリとオラクルを比較")
    report = compare_accf(1000, np.random.default_rng(6))
    assert report.cases_run == 1000
    assert report.passed, report.mismatches[:3]


def test_naive_accf_exact_quaternary():
    """ガウス整数による厳密な相関が浮動小数点と一致するかのテスト"""
    logger.info("テストケース: q = 4 の厳密計算")
    a = (0, 1, 2, 3)
    b = (0, 0, 1, 3)
    for tau in range(-4, 5):
        re, im = naive_accf_exact(a, b, 4, tau)
        expected = naive_accf(
            zq_to_complex(ZqSequence(q=4, values=a)),
            zq_to_complex(ZqSequence(q=4, values=b)),
            tau,
        )
        assert abs(complex(re, im) - expected) <= 1e-12


def test_naive_accf_exact_rejects_other_alphabets():
    """q が 1, 2, 4 以外のときのテスト"""
    logger.info("テストケース: q = 3 は厳密計算の対象外")
    with pytest.raises(ArgumentError):
        naive_accf_exact((0, 1), (0, 1), 3, 0)


def test_verify_set_exact():
    """厳密判定の合否と空集合のテスト"""
    logger.info("テストケース: 長さ 4 の二値対")
    assert verify_set_exact(
        [ZqSequence(q=2, values=(0, 0, 0, 1)), ZqSequence(q=2, values=(0, 0, 1, 0))]
    )
    assert not verify_set_exact([ZqSequence(q=2, values=(0, 0, 0))])
    with pytest.raises(ArgumentError):
        verify_set_exact([])


def test_naive_is_gcs_float_path():
    """q = 6 の浮動小数点による判定のテスト"""
    logger.info("テストケース: (p=3, q=6, L=10)")
    gcs = build_gcs(GcsParams(p=3, q=6, L=10))
    assert naive_is_gcs(gcs.zq_sequences())
    assert not naive_is_gcs([ZqSequence(q=3, values=(0, 0, 0))])


def test_naive_is_gcs_rejects_empty_set():
    """空集合が引数エラーになるかのテスト"""
    logger.info("テストケース: 空集合")
    with pytest.raises(ArgumentError):
        naive_is_gcs([])


def test_direct_example1_rows():
    """閉じた式で求めた表の先頭と末尾の行のテスト"""
    logger.info("テストケース: 直接評価した 16 x 19 の表")
    matrix = direct_example1()
    assert len(matrix) == 16
    assert matrix[0] == [0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 0, 3, 2, 1, 0, 0, 0]
    assert matrix[15] == [0, 3, 2, 1, 0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 3, 2, 1]


def test_direct_example1_equals_construction():
    """直接評価と構成の結果が一致するかのテスト"""
    logger.info("テストケース: 構成との一致")
    assert build_gcs(example1_params()).zq_matrix().tolist() == direct_example1()


def test_exhaustive_search_binary_length_two():
    """全探索の結果に構成した集合が含まれるかのテスト"""
    logger.info("テストケース: q=2, L=2, M=2 の全探索")
    found = exhaustive_tiny_search(2, 2, 2)
    assert found
    for rows in found:
        assert verify_set_exact(list(rows))
    found_sets = {frozenset(row.values for row in rows) for rows in found}
    assert frozenset({(0, 0), (0, 1)}) in found_sets

    constructed = dedupe(build_gcs(GcsParams(p=2, q=2, L=2)))
    target = sorted(seq.values for seq in constructed.zq_sequences())
    assert target in [sorted(row.values for row in rows) for rows in found]


def test_exhaustive_search_is_self_certifying():
    """全探索の結果がすべて GCS であるかのテスト"""
    logger.info("テストケース: q=4, L=3, M=2 の全探索")
    found = exhaustive_tiny_search(4, 3, 2)
    assert found
    for rows in found:
        assert naive_is_gcs(list(rows))
    # {(1, 1, -1), (1, i, 1)}
    found_sets = {frozenset(row.values for row in rows) for rows in found}
    assert frozenset({(0, 0, 2), (0, 1, 0)}) in found_sets


def test_exhaustive_search_no_binary_pair_of_length_three():
    """長さ 3 の二値対が存在しないことのテスト"""
    logger.info("テストケース: q=2, L=3, M=2")
    assert exhaustive_tiny_search(2, 3, 2) == []


def test_exhaustive_search_singletons_of_length_one():
    """長さ 1 の系列 1 本はすべて GCS になるかのテスト"""
    logger.info("テストケース: q=3, L=1, M=1")
    found = exhaustive_tiny_search(3, 1, 1)
    assert len(found) == 3


@pytest.mark.parametrize("q, L, M", [(2, 10, 2), (2, 5, 1), (2, 2, 3), (60, 4, 2)])
def test_exhaustive_search_refuses_large_spaces(q, L, M):
    """探索空間が上限を超えると拒否するかのテスト"""
    logger.info("テストケース: 探索空間の上限", q=q, L=L, M=M)
    with pytest.raises(SearchSpaceError):
        exhaustive_tiny_search(q, L, M)


def test_exhaustive_search_rejects_bad_sizes():
    """L = 0 のテスト"""
    logger.info("テストケース: L = 0")
    with pytest.raises(ArgumentError):
        exhaustive_tiny_search(2, 0, 2)
