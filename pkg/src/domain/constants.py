"""分離ネットと変位計算のための数値定数。

このモジュールは、有限窓上での厳密検証に使う許容誤差と、
各アルゴリズムの既定パラメータを定義します。
"""

# ============================================================================
# 窓と球の判定
# ============================================================================

#: 閉球 B̄(0,R) の所属判定に使う絶対許容誤差(‖p‖ ≤ R + tol)
BALL_TOLERANCE: float = 1e-9

#: 相異なるノルムを同一視する許容誤差(層間ギャップ計算用)
DISTINCT_NORM_TOLERANCE: float = 1e-12

# ============================================================================
# ネット定数のプローブ
# ============================================================================

#: プローブ格子のピッチ = 分離定数 × この係数
PROBE_PITCH_FRACTION: float = 0.25

#: 1回の証明書計算で使うプローブ点数の上限
MAX_PROBES: int = 250_000

#: 境界マージンの反復回数の上限
MAX_MARGIN_ITERATIONS: int = 16

# ============================================================================
# 増大関数 φ の計算
# ============================================================================

#: 逆関数の相対許容誤差 |φ(R) − y| ≤ tol·max(1, y)
INVERSE_REL_TOLERANCE: float = 1e-9

#: 二分法の最大反復回数
INVERSE_MAX_ITERATIONS: int = 2_000

#: 上側ブラケット探索の上限
INVERSE_MAX_RADIUS: float = 1e300

#: 倍化定数のサンプル数(64以上)
DOUBLING_SAMPLES: int = 256

#: 凹性チェックのサンプル数(256以上)
CONCAVITY_SAMPLES: int = 256

#: 凹性チェックの相対許容誤差
CONCAVITY_TOLERANCE: float = 1e-9

# ============================================================================
# 半径スケジュール
# ============================================================================

#: 倍率 M の探索で試す 2 の冪指数の上限
SCHEDULE_MAX_EXPONENT: int = 64

#: スケジュール不変条件の相対許容誤差
SCHEDULE_TOLERANCE: float = 1e-9

# ============================================================================
# 構成と検証
# ============================================================================

#: L, U 推定の安全マージン(10%)
SLOPE_MARGIN: float = 0.10

#: 傾き判定の許容誤差
SLOPE_TOLERANCE: float = 1e-9

#: 不一致度の既定の二進分割深さ
DISCREPANCY_DEPTH: int = 3

#: 線形変位全単射でのスナップ倍率 r = この係数 × s/(2b)
SNAP_FRACTION: float = 0.99

# ============================================================================
# マッチング
# ============================================================================

#: 総当たりオラクルが受け付ける最大の始点数
BRUTE_FORCE_MAX_SOURCES: int = 8

#: 既定の候補半径 = 数え上げ下界 + この係数 × ネット定数
BOTTLENECK_CAP_NET_FACTOR: float = 4.0

#: 候補半径を倍化する最大回数
BOTTLENECK_MAX_DOUBLINGS: int = 32

#: 密な距離行列を使う始点×終点の上限(超えたら k-d 木)
DENSE_PAIR_LIMIT: int = 2_000_000

#: 乱択テストの既定シード
DEFAULT_SEED: int = 7

#: 曲線上でボトルネック最適値を計算する始点数の上限(超える半径は省略)
BOTTLENECK_MAX_POINTS: int = 5_000

# ============================================================================
# 実験の既定値
# ============================================================================

#: 半径スケジュールの既定の比 K
DEFAULT_RATIO: float = 4.0

#: 半径スケジュールの既定の長さ n
DEFAULT_SCHEDULE_LENGTH: int = 3

#: 共有の半径グリッドの既定の点数
DEFAULT_GRID_POINTS: int = 24

#: オラクル比較の既定の試行回数(次元ごと)
ORACLE_TRIALS: int = 200

#: オラクル比較の座標範囲 [0, ORACLE_SPAN]^d
ORACLE_SPAN: float = 10.0
