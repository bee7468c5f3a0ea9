"""検証スイートの表示用のPresenter層

このモジュールは、受け入れ基準の結果をコンソール表示用に準備します。
"""

from typing import Any

from src.application.acceptance import CriterionResult
from src.constants.plot import STATUS_FAIL, STATUS_PASS, SUMMARY_MAX_KEYS
from src.visualization.models import CriterionRowViewModel, SuiteViewModel


def summarize_details(details: dict[str, Any], max_keys: int = SUMMARY_MAX_KEYS) -> str:
    """詳細のうちスカラー値の先頭 max_keys 個を "key=value" で連結します。

    Examples:
        >>> summarize_details({"r0": 4.0, "rows": [1, 2], "c_phi": 1.4142})
        'r0=4, c_phi=1.414'
        >>> summarize_details({})
        ''
    """
    parts = []
    for key, value in details.items():
        if isinstance(value, bool | int | str):
            parts.append(f"{key}={value}")
        elif isinstance(value, float):
            parts.append(f"{key}={value:.4g}")
        if len(parts) == max_keys:
            break
    return ", ".join(parts)


def prepare_suite_view_model(suite: str, results: list[CriterionResult]) -> SuiteViewModel:
    """基準の結果から SuiteViewModel を準備します。"""
    rows = [
        CriterionRowViewModel(
            criterion_id=result.criterion_id,
            name=result.name,
            status=STATUS_PASS if result.passed else STATUS_FAIL,
            seconds=result.seconds,
            summary=summarize_details(result.details),
        )
        for result in results
    ]
    return SuiteViewModel(
        suite=suite, rows=rows, passed_count=sum(1 for r in results if r.passed)
    )


def format_suite_table(view_model: SuiteViewModel) -> str:
    """コンソール用の表を整形します。"""
    name_width = max((len(row.name) for row in view_model.rows), default=4)
    lines = [f"suite: {view_model.suite}"]
    for row in view_model.rows:
        lines.append(
            f"  {row.criterion_id:>3}  {row.name:<{name_width}}  {row.status}"
            f"  {row.seconds:7.2f}s  {row.summary}".rstrip()
        )
    lines.append(f"{view_model.passed_count}/{view_model.total} passed")
    return "\n".join(lines)
