#!/usr/bin/env python3
import argparse
import asyncio
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

import numpy as np
import structlog
import toml
from pydantic import BaseModel, Field, ValidationError, field_validator

from golay_gcs.construct import (
    GcsParams,
    build_gcs,
    dedupe,
    example1_params,
    random_params,
)
from golay_gcs.correlation import aacf_sum, is_gcs
from golay_gcs.ebf import parse_anf, zq_to_complex
from golay_gcs.errors import GcsError, SearchSpaceError
from golay_gcs.export import (
    format_float,
    gcs_to_json,
    load_set,
    matrix_to_csv,
    pmepr_report_to_csv,
    profile_to_csv,
)
from golay_gcs.logging_config import configure_logging
from golay_gcs.oracle import exhaustive_tiny_search
from golay_gcs.pmepr import DEFAULT_OVERSAMPLING, pmepr_report
from golay_gcs.sweep import draw_parameters, rows_to_csv, run_sweep

logger = structlog.get_logger(__name__)

DEFAULT_CONFIG_FILENAME = "golay-gcs-config.toml"
OUTPUT_DIR_ENV = "GOLAY_GCS_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_BOUND_EXCEEDED = 3


class UsageError(GcsError):
    """コマンドライン引数の誤り"""


class _ArgumentParser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        # --c が --config の省略形と解釈されないようにする
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    # argparse 既定の終了コード 2 は検証失敗に使うので、例外にして main で 1 に変換する
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class RunConfig(BaseModel):
    """検証済みの実行設定。サブコマンドごとに使うフィールドだけが意味を持つ"""

    command: Literal["generate", "verify", "pmepr", "sweep", "reproduce", "search"]
    # generate
    p: Optional[int] = None
    q: Optional[int] = None
    L: Optional[int] = None
    pi: Optional[List[int]] = None
    g: Optional[str] = None
    c: Optional[List[int]] = None
    c_prime: Optional[int] = None
    seed: Optional[int] = None
    dedupe: bool = False
    # verify / pmepr
    input: Optional[Path] = None
    # reproduce / search
    target: Optional[Literal["table1", "fig1"]] = None
    M: int = Field(default=2, ge=1)
    # sweep
    p_values: List[int] = Field(default_factory=lambda: [2, 3, 4, 5])
    q_multipliers: List[int] = Field(default_factory=lambda: [1, 2, 3])
    L_min: Optional[int] = Field(default=None, ge=1)
    L_max: int = Field(default=200, ge=1)
    count: int = Field(default=200, ge=1)
    jobs: int = Field(default=4, ge=1)
    # 共通
    output: Optional[Path] = None
    output_dir: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    tolerance: Optional[float] = Field(default=None, ge=0)
    oversampling: int = Field(default=DEFAULT_OVERSAMPLING, ge=1)
    log_level: Literal["debug", "info", "warning", "error"] = "info"

    @field_validator("p_values")
    @classmethod
    def _check_p_values(cls, values: List[int]) -> List[int]:
        if not values or min(values) < 2:
            raise ValueError("sweep --p needs one or more integers >= 2")
        return values

    @field_validator("q_multipliers")
    @classmethod
    def _check_q_multipliers(cls, values: List[int]) -> List[int]:
        if not values or min(values) < 1:
            raise ValueError("sweep --q-mult needs one or more integers >= 1")
        return values


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated list of integers, got {text!r}"
        ) from None


def load_config(path: str) -> Dict[str, Any]:
    """TOML 設定ファイルを読む。読めない場合は空の設定で続行する"""
    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                values = toml.load(f)
            logger.debug("Config file loaded", path=path)
            return values
        if path == DEFAULT_CONFIG_FILENAME:
            logger.debug("Default config file not found, ignoring", path=path)
        else:
            logger.warning("Config file not found", path=path)
    except Exception as e:
        logger.error("Failed to read config file", path=path, error=str(e))
    return {}


def _add_common_arguments(parser: argparse.ArgumentParser, defaults: Dict[str, Any]):
    parser.add_argument(
        "--output",
        "-o",
        type=Path,
        default=None,
        help="出力ファイル (省略時は標準出力。相対パスは出力ディレクトリ基準)",
    )
    output_dir_default = defaults.get("output_dir") or os.environ.get(OUTPUT_DIR_ENV)
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=output_dir_default,
        help=f"出力ディレクトリ (デフォルト: TOML の output_dir か ${OUTPUT_DIR_ENV})",
    )
    tolerance_default = defaults.get("tolerance", None)
    parser.add_argument(
        "--tolerance",
        type=float,
        default=tolerance_default,
        help="GCS 判定の絶対許容誤差 (デフォルト: 1e-9 * M * L)",
    )
    oversampling_default = defaults.get("oversampling", DEFAULT_OVERSAMPLING)
    parser.add_argument(
        "--oversampling",
        type=int,
        default=oversampling_default,
        help=f"PMEPR 評価のオーバーサンプリング率 (デフォルト: {oversampling_default})",
    )
    log_level_default = defaults.get("log_level", "info")
    parser.add_argument(
        "--log-level",
        type=str.lower,
        default=log_level_default,
        help=f"ログレベル (デフォルト: {log_level_default})",
    )


def _build_parser(
    config_parser: argparse.ArgumentParser, defaults: Dict[str, Any]
) -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="golay-gcs",
        description="Golay complementary set generator and verifier",
        epilog="設定の優先順位: コマンドライン引数 > TOML設定ファイル > ハードコードされたデフォルト値",
        parents=[config_parser],
    )
    subparsers = parser.add_subparsers(dest="command")

    generate = subparsers.add_parser("generate", help="GCS を構成して出力する")
    generate.add_argument("--p", type=int, help="素数とは限らない基数 p (>= 2)")
    generate.add_argument("--q", type=int, help="アルファベットサイズ q (p | q)")
    generate.add_argument("--L", type=int, help="系列長 L (>= p)")
    generate.add_argument("--pi", type=_int_list, help="pi(1), ..., pi(m-1) (カンマ区切り)")
    generate.add_argument("--g", type=str, help="m-1 変数の g (ANF テキスト)")
    generate.add_argument("--c", type=_int_list, help="c_1, ..., c_m (カンマ区切り)")
    generate.add_argument("--c-prime", type=int, help="定数項 c'")
    generate.add_argument(
        "--seed", type=int, help="pi, g, c, c' を乱数で決める (明示した値が優先)"
    )
    generate.add_argument(
        "--dedupe", action="store_true", help="重複した系列を取り除いてから出力する"
    )
    generate.add_argument(
        "--format", choices=["json", "csv"], default="json", help="出力形式"
    )
    _add_common_arguments(generate, defaults)

    for name, text in (
        ("verify", "系列集合が GCS かを判定する"),
        ("pmepr", "各系列の PMEPR を求める"),
    ):
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument("input", type=Path, help="JSON または CSV の系列集合")
        sub.add_argument("--q", type=int, help="CSV 入力のアルファベットサイズ")
        _add_common_arguments(sub, defaults)

    sweep = subparsers.add_parser("sweep", help="ランダムなパラメータで一括検証する")
    sweep.add_argument(
        "--p", dest="p_values", type=_int_list, default=[2, 3, 4, 5], help="p の候補"
    )
    sweep.add_argument(
        "--q-mult",
        dest="q_multipliers",
        type=_int_list,
        default=[1, 2, 3],
        help="q = p * (倍数) の倍数の候補",
    )
    sweep.add_argument("--L-min", dest="L_min", type=int, help="L の下限 (デフォルト: p)")
    sweep.add_argument("--L-max", dest="L_max", type=int, default=200, help="L の上限")
    sweep.add_argument("--count", type=int, default=200, help="試行回数")
    seed_default = defaults.get("seed", 0)
    sweep.add_argument(
        "--seed", type=int, default=seed_default, help=f"乱数シード (デフォルト: {seed_default})"
    )
    jobs_default = defaults.get("jobs", 4)
    sweep.add_argument(
        "--jobs", type=int, default=jobs_default, help=f"並列数 (デフォルト: {jobs_default})"
    )
    _add_common_arguments(sweep, defaults)

    reproduce = subparsers.add_parser("reproduce", help="長さ 19 の例の表と相関プロファイル")
    reproduce.add_argument("target", choices=["table1", "fig1"])
    _add_common_arguments(reproduce, defaults)

    search = subparsers.add_parser("search", help="小さなサイズで GCS を全探索する")
    search.add_argument("--q", type=int, required=True)
    search.add_argument("--L", type=int, required=True)
    search.add_argument("--M", type=int, default=2)
    _add_common_arguments(search, defaults)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    # 設定ファイル専用のパーサーで --config を先に解析
    config_parser = _ArgumentParser(add_help=False)
    config_parser.add_argument(
        "--config",
        type=str,
        default=DEFAULT_CONFIG_FILENAME,
        help=f"TOML設定ファイルのパス (デフォルト: {DEFAULT_CONFIG_FILENAME})",
    )
    config_args, remaining_argv = config_parser.parse_known_args(argv)
    defaults = load_config(config_args.config)

    parser = _build_parser(config_parser, defaults)
    args = parser.parse_args(remaining_argv)
    if args.command is None:
        parser.error("a subcommand is required")

    values = vars(args)
    values.pop("config", None)
    return RunConfig.model_validate(values)


def resolve_output(config: RunConfig) -> Optional[Path]:
    if config.output is None:
        return None
    if config.output.is_absolute() or config.output_dir is None:
        return config.output
    return config.output_dir / config.output


def _emit(config: RunConfig, text: str) -> None:
    path = resolve_output(config)
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Output written", path=str(path))


def _report(config: RunConfig, line: str) -> None:
    # 結果本体が標準出力を使うときは要約を標準エラーに回す
    stream = sys.stdout if config.output is not None else sys.stderr
    print(line, file=stream)


def build_params(config: RunConfig) -> GcsParams:
    """フラグ (と --seed による乱数) から構成パラメータを組み立てる"""
    if config.p is None or config.q is None or config.L is None:
        raise UsageError("generate needs --p, --q and --L")
    # p, q, L の検証と m の導出を先に済ませる
    skeleton = GcsParams(p=config.p, q=config.q, L=config.L)
    drawn = (
        random_params(config.p, config.q, config.L, np.random.default_rng(config.seed))
        if config.seed is not None
        else skeleton
    )
    # pi と c を g より先に検証する
    checked = GcsParams(
        p=config.p,
        q=config.q,
        L=config.L,
        pi=tuple(config.pi) if config.pi is not None else drawn.pi,
        g=drawn.g,
        c=tuple(config.c) if config.c is not None else drawn.c,
        c_prime=config.c_prime if config.c_prime is not None else drawn.c_prime,
    )
    if config.g is None:
        return checked
    g = parse_anf(config.g, config.p, skeleton.m - 1, config.q)
    return replace(checked, g=g)


def cmd_generate(config: RunConfig) -> int:
    params = build_params(config)
    gcs = build_gcs(params)
    distinct = dedupe(gcs)
    emitted = distinct if config.dedupe else gcs
    verdict = is_gcs(emitted.complex_sequences(), config.tolerance)

    if config.format == "json":
        _emit(config, gcs_to_json(emitted))
    else:
        _emit(config, matrix_to_csv(emitted.zq_matrix()))

    logger.info("GCS constructed", **params.summary())
    _report(
        config,
        f"({params.q}, {gcs.flock_size}->{distinct.flock_size}, {params.L})-GCS "
        f"verdict={'pass' if verdict.passed else 'fail'} "
        f"max_sidelobe={format_float(verdict.worst_magnitude)}",
    )
    return EXIT_OK if verdict.passed else EXIT_VERIFICATION_FAILED


def _require_input(config: RunConfig) -> Path:
    if config.input is None:
        raise UsageError(f"{config.command} needs an input file")
    return config.input


def cmd_verify(config: RunConfig) -> int:
    q, sequences, _ = load_set(_require_input(config), config.q)
    verdict = is_gcs([zq_to_complex(s) for s in sequences], config.tolerance)
    worst_tau = "-" if verdict.worst_tau is None else str(verdict.worst_tau)
    lines = [
        f"q={q} M={verdict.flock_size} L={verdict.length}",
        f"peak: {format_float(verdict.peak.real)} at tau=0",
        f"max off-peak |sum|: {format_float(verdict.worst_magnitude)} at tau={worst_tau}",
        f"verdict: {'PASS' if verdict.passed else 'FAIL'} "
        f"(tolerance {verdict.tolerance:.3e})",
    ]
    _emit(config, "\n".join(lines) + "\n")
    if not verdict.passed:
        logger.warning(
            "Not a complementary set",
            worst_tau=verdict.worst_tau,
            worst_magnitude=verdict.worst_magnitude,
        )
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_pmepr(config: RunConfig) -> int:
    _, sequences, gammas = load_set(_require_input(config), config.q)
    report = pmepr_report(sequences, config.oversampling, gammas=gammas)
    _emit(config, pmepr_report_to_csv(report))
    _report(
        config,
        f"max pmepr {format_float(report.maximum)} "
        f"{'<=' if report.within_bound else '>'} bound {format_float(report.bound)}",
    )
    if not report.within_bound:
        logger.warning(
            "PMEPR exceeds the flock-size bound",
            maximum=report.maximum,
            bound=report.bound,
        )
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


async def cmd_sweep(config: RunConfig) -> int:
    draws = draw_parameters(
        config.p_values,
        config.q_multipliers,
        config.L_max,
        config.count,
        0 if config.seed is None else config.seed,
        config.L_min,
    )
    logger.info("Starting sweep", draws=len(draws), jobs=config.jobs)
    rows = await run_sweep(draws, config.oversampling, config.tolerance, config.jobs)
    _emit(config, rows_to_csv(rows))

    failures = [row for row in rows if row.failed]
    skipped = sum(row.verdict == "skipped" for row in rows)
    logger.info(
        "Sweep finished", draws=len(rows), failures=len(failures), skipped=skipped
    )
    for row in failures:
        logger.error(
            "Sweep failure",
            index=row.draw.index,
            p=row.draw.p,
            q=row.draw.q,
            L=row.draw.L,
        )
    return EXIT_VERIFICATION_FAILED if failures else EXIT_OK


def cmd_reproduce(config: RunConfig) -> int:
    gcs = build_gcs(example1_params())
    if config.target == "table1":
        _emit(config, matrix_to_csv(gcs.zq_matrix()))
    elif config.target == "fig1":
        _emit(config, profile_to_csv(aacf_sum(gcs.complex_sequences())))
    else:
        raise UsageError("reproduce needs a target (table1 or fig1)")
    return EXIT_OK


def cmd_search(config: RunConfig) -> int:
    if config.q is None or config.L is None:
        raise UsageError("search needs --q and --L")
    found = exhaustive_tiny_search(config.q, config.L, config.M)
    lines = [
        ";".join(",".join(str(v) for v in seq.values) for seq in rows)
        for rows in found
    ]
    _emit(config, "".join(line + "\n" for line in lines))
    logger.info("Search finished", q=config.q, L=config.L, M=config.M, found=len(found))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "pmepr": cmd_pmepr,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
    "search": cmd_search,
}


async def run_command(config: RunConfig) -> int:
    """サブコマンドを実行し、例外を終了コードに変換する"""
    handler = COMMANDS[config.command]
    try:
        result = handler(config)
        if asyncio.iscoroutine(result):
            result = await result
        return result
    except SearchSpaceError as e:
        logger.error("Search space bound exceeded", error=str(e))
        return EXIT_BOUND_EXCEEDED
    except (GcsError, ValidationError) as e:
        logger.error(f"{config.command} failed", error=str(e))
        return EXIT_USAGE
    except OSError as e:
        logger.error("File access failed", error=str(e))
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging("info")
    try:
        config = parse_args(argv)
    except (UsageError, ValidationError) as e:
        logger.error("Invalid command line", error=str(e))
        return EXIT_USAGE
    configure_logging(config.log_level)
    logger.debug("Command line arguments parsed", config=config.model_dump(mode="json"))
    return asyncio.run(run_command(config))


def run_cli():
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
