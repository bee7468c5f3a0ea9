"""ユークリッド距離の基本演算。

距離はすべてこのモジュールの関数で計算します。同じ点の組に対しては
行列版とペア版がビット単位で一致するため、最適値の比較を厳密に行えます。
"""

import math

import numpy as np


def as_points(points: object, dim: int | None = None) -> np.ndarray:
    """点列を (n, d) の float64 配列に変換します。

    1次元配列は1次元空間の座標列として扱います。

    Args:
        points: 点の配列またはシーケンス
        dim: 空配列のときに使う次元

    Returns:
        (n, d) 配列
    """
    array = np.asarray(points, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.size == 0 and dim is not None:
        return array.reshape(0, dim)
    return array


def point_norms(points: np.ndarray) -> np.ndarray:
    """各点のユークリッドノルムを返します。"""
    return np.sqrt(np.sum(points * points, axis=-1))


def pair_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """対応する点どうしの距離 ‖a_i − b_i‖ を返します。"""
    diff = a - b
    return np.sqrt(np.sum(diff * diff, axis=-1))


def distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """全組み合わせの距離行列 D[i, j] = ‖a_i − b_j‖ を返します。"""
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def ball_volume(dim: int, radius: float) -> float:
    """d 次元閉球のルベーグ測度 π^{d/2} R^d / Γ(d/2 + 1) を返します。

    Examples:
        >>> ball_volume(1, 100.0)
        200.0
        >>> round(ball_volume(2, 1.0), 6)
        3.141593
    """
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius**dim
