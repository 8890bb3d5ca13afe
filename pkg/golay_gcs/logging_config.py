import logging
import sys

import structlog


def _stderr_logger_factory(*args) -> structlog.PrintLogger:
    # 呼び出し時点の sys.stderr に書く (標準出力は CSV / JSON 用に空けておく)
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str = "info") -> None:
    """structlog の設定。CLI とテストから一度ずつ呼ばれる"""
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        raise ValueError(f"unknown log level: {level}")
    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=_stderr_logger_factory,
        cache_logger_on_first_use=False,
    )
