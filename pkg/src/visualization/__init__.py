"""可視化モジュール - Plotlyを使用したグラフ生成

このモジュールは、変位曲線・密度の推定値のグラフと、
検証スイートのコンソール表示を提供します。
"""

from src.visualization.curve_plot import (
    create_curve_figure,
    create_density_figure,
    prepare_curve_series,
)

__all__ = [
    "create_curve_figure",
    "create_density_figure",
    "prepare_curve_series",
]
