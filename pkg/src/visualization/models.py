"""Visualization layer data models.

このモジュールは、可視化層で使用されるデータモデルを定義します。
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class CurveSeries:
    """1本の曲線の描画用データ。

    Attributes:
        label: 凡例に出す名前
        kind: CurveKind の値
        radii: 半径 R
        values: 値
        truncated: 窓の外を打ち切ったか
    """

    label: str
    kind: str
    radii: tuple[float, ...]
    values: tuple[float, ...]
    truncated: bool = False


@dataclass(frozen=True)
class CriterionRowViewModel:
    """受け入れ基準1行の表示用データモデル

    Attributes:
        criterion_id: 基準番号
        name: 基準の名前
        status: PASS / FAIL
        seconds: 実行時間
        summary: 詳細の短い要約
    """

    criterion_id: str
    name: str
    status: str
    seconds: float
    summary: str


@dataclass(frozen=True)
class SuiteViewModel:
    """検証スイートの表示用データモデル

    Attributes:
        suite: スイート名
        rows: 基準ごとの行
        passed_count: 合格した基準の数
    """

    suite: str
    rows: list[CriterionRowViewModel]
    passed_count: int

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def all_passed(self) -> bool:
        return self.passed_count == self.total
