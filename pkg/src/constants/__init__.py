"""定数モジュール - ドメインロジックとプロット表示用の定数。

このモジュールは、プロジェクト全体で使用される定数を提供します。
定数は責務ごとに分離されています:
- domain: ドメインロジック(許容誤差、窓と探索の上限、実験の既定値)
- plot: プロットとレポート表示
"""

from src.constants.plot import CURVE_STYLES, KIND_LABELS, STATUS_FAIL, STATUS_PASS
from src.domain.constants import (
    BALL_TOLERANCE,
    DEFAULT_RATIO,
    DEFAULT_SCHEDULE_LENGTH,
    DEFAULT_SEED,
)

__all__ = [
    # Domain constants
    "BALL_TOLERANCE",
    "DEFAULT_RATIO",
    "DEFAULT_SCHEDULE_LENGTH",
    "DEFAULT_SEED",
    # Plot constants
    "CURVE_STYLES",
    "KIND_LABELS",
    "STATUS_FAIL",
    "STATUS_PASS",
]
