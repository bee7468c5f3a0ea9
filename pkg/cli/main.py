"""コマンドの実行と終了コードの決定。

終了コード:
    0: 成功
    1: 検証または不変条件の検査に失敗
    2: 設定の検証エラー、または構成の前提が成り立たない
"""

import json
import logging
import sys
from collections.abc import Callable

from pydantic import ValidationError

from cli.config.constants import (
    CONFIG_FILENAME,
    CURVES_PLOT_FILENAME,
    DENSITY_PLOT_FILENAME,
    EXIT_FAILED,
    EXIT_INVALID,
    EXIT_OK,
    LOG_FORMAT,
)
from cli.parser import build_parser, overrides_from_args
from src.application import artifacts
from src.application.dto import ExperimentConfig
from src.application.use_cases import (
    DensityUseCase,
    DisplacementUseCase,
    GenerateNetUseCase,
    VerifySuiteUseCase,
)
from src.constants.plot import PLOTLY_JS
from src.domain.errors import NetLabError
from src.visualization.curve_plot import (
    create_curve_figure,
    create_density_figure,
    prepare_curve_series,
)
from src.visualization.report_presenter import format_suite_table, prepare_suite_view_model

logger = logging.getLogger(__name__)


def configure_logging(level: str) -> None:
    """ルートロガーを標準エラー出力に設定します。"""
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _write_plot(config: ExperimentConfig, name: str, html: str) -> None:
    if config.plots:
        artifacts.atomic_write_text(config.out / name, html)


def run_generate(config: ExperimentConfig) -> int:
    result = GenerateNetUseCase().execute(config)
    failed = [name for name, ok in result.checks.items() if not ok]
    if failed:
        logger.error("検査に失敗しました: %s", ", ".join(failed))
        return EXIT_FAILED
    return EXIT_OK


def run_displacement(config: ExperimentConfig) -> int:
    result = DisplacementUseCase().execute(config)
    for item in result.incomplete:
        logger.info("省略: %s R=%g (%s)", item.curve, item.radius, item.reason)
    fig = create_curve_figure(prepare_curve_series(result.curves), title=config.net.family)
    _write_plot(
        config, CURVES_PLOT_FILENAME, fig.to_html(include_plotlyjs=PLOTLY_JS, div_id="curves")
    )
    return EXIT_OK


def run_density(config: ExperimentConfig) -> int:
    result = DensityUseCase().execute(config)
    fig = create_density_figure(result.density, result.discrepancy)
    _write_plot(
        config, DENSITY_PLOT_FILENAME, fig.to_html(include_plotlyjs=PLOTLY_JS, div_id="density")
    )
    return EXIT_OK


def run_verify(config: ExperimentConfig) -> int:
    report = VerifySuiteUseCase().execute(config)
    print(format_suite_table(prepare_suite_view_model(report.suite, report.criteria)))
    return EXIT_OK if report.passed else EXIT_FAILED


COMMAND_RUNNERS: dict[str, Callable[[ExperimentConfig], int]] = {
    "generate": run_generate,
    "displacement": run_displacement,
    "verify": run_verify,
    "density": run_density,
}


def main(argv: list[str] | None = None) -> int:
    """CLI のエントリポイント。終了コードを返します。"""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = ExperimentConfig.load(args.config, overrides_from_args(args))
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        logger.error("設定が不正です: %s", exc)
        return EXIT_INVALID

    artifacts.atomic_write_text(config.out / CONFIG_FILENAME, config.to_json())
    try:
        return COMMAND_RUNNERS[config.command](config)
    except NetLabError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVALID
