"""プロットとレポート表示の定数。"""

# ===== 曲線の描画スタイル =====
# キーは CurveKind の値
CURVE_STYLES: dict[str, dict[str, str | float]] = {
    "exact-of-map": {"color": "#1f77b4", "dash": "solid", "width": 2.0},
    "counting-lower-bound": {"color": "#d62728", "dash": "dot", "width": 2.0},
    "bottleneck-optimal": {"color": "#2ca02c", "dash": "solid", "width": 1.5},
    "analytic-upper-bound": {"color": "#7f7f7f", "dash": "dash", "width": 1.5},
}

# 未知の種類に使うスタイル
FALLBACK_STYLE: dict[str, str | float] = {"color": "black", "dash": "solid", "width": 1.0}

# 凡例に出す種類の短い名前
KIND_LABELS = {
    "exact-of-map": "exact",
    "counting-lower-bound": "lower",
    "bottleneck-optimal": "bottleneck",
    "analytic-upper-bound": "upper",
}

# ===== 図の体裁 =====
FIGURE_HEIGHT = 520
FIGURE_TEMPLATE = "plotly_white"
PLOTLY_JS = "cdn"

# ===== レポート =====
STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"

# 詳細の要約に含めるキーの最大数
SUMMARY_MAX_KEYS = 3
