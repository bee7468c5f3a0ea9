"""変位曲線と密度のグラフ生成モジュール (Presenter層)

共有の半径グリッド上の曲線(厳密値・下界・ボトルネック最適値・解析的上界)を
1枚の図に重ねて表示します。横軸は対数目盛りです。
"""

import plotly.graph_objects as go
from plotly.graph_objects import Figure

from src.constants.plot import (
    CURVE_STYLES,
    FALLBACK_STYLE,
    FIGURE_HEIGHT,
    FIGURE_TEMPLATE,
    KIND_LABELS,
)
from src.domain.models import DisplacementCurve
from src.visualization.models import CurveSeries


def prepare_curve_series(curves: list[DisplacementCurve]) -> list[CurveSeries]:
    """曲線を描画用のデータに変換します。空の曲線は除きます。

    Examples:
        >>> from src.domain.models import CurveKind
        >>> curve = DisplacementCurve((1.0, 2.0), (0.0, 1.0), CurveKind.EXACT, "g")
        >>> prepare_curve_series([curve])[0].label
        'exact: g'
    """
    return [
        CurveSeries(
            label=f"{KIND_LABELS.get(str(curve.kind), str(curve.kind))}: {curve.label}",
            kind=str(curve.kind),
            radii=curve.radii,
            values=curve.values,
            truncated=curve.truncated,
        )
        for curve in curves
        if len(curve)
    ]


def create_curve_figure(series: list[CurveSeries], title: str = "displacement") -> Figure:
    """曲線を重ねた図を生成します。

    Args:
        series: prepare_curve_series の結果
        title: 図のタイトル

    Returns:
        Plotly Figure オブジェクト
    """
    fig = go.Figure()
    for item in series:
        style = CURVE_STYLES.get(item.kind, FALLBACK_STYLE)
        name = f"{item.label} (truncated)" if item.truncated else item.label
        fig.add_trace(
            go.Scatter(
                x=list(item.radii),
                y=list(item.values),
                mode="lines+markers" if len(item.radii) < 40 else "lines",  # noqa: PLR2004
                name=name,
                line={"color": style["color"], "dash": style["dash"], "width": style["width"]},
                hovertemplate="R: %{x:.4g}<br>value: %{y:.4g}<extra></extra>",
            )
        )
    fig.update_layout(
        title=title,
        template=FIGURE_TEMPLATE,
        height=FIGURE_HEIGHT,
        xaxis={"title": "R", "type": "log"},
        yaxis={"title": "disp_R"},
        legend={"orientation": "h", "y": -0.2},
    )
    return fig


def create_density_figure(
    density: list[tuple[float, float]], discrepancy: list[tuple[float, float, float]]
) -> Figure:
    """α̂(R) と不一致度の図を生成します。"""
    fig = go.Figure()
    fig.add_trace(
        go.Scatter(
            x=[r for r, _ in density],
            y=[a for _, a in density],
            mode="lines+markers",
            name="alpha_hat",
        )
    )
    for index, name in ((1, "discrepancy (uniform)"), (2, "discrepancy (limit)")):
        fig.add_trace(
            go.Scatter(
                x=[row[0] for row in discrepancy],
                y=[row[index] for row in discrepancy],
                mode="lines+markers",
                name=name,
                line={"dash": "dot"},
            )
        )
    fig.update_layout(
        title="natural density",
        template=FIGURE_TEMPLATE,
        height=FIGURE_HEIGHT,
        xaxis={"title": "R", "type": "log"},
    )
    return fig
