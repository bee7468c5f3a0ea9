"""分離ネットの有限窓に対する計量的な量。

このモジュールは、窓 B̄(0, R_max) 内で完全なネットについて、
分離定数・ネット定数・層間ギャップ・球内の点数・自然密度の曲線・
計数測度の不一致度を厳密に計算します。
"""

import itertools
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from src.domain.constants import (
    BALL_TOLERANCE,
    DISCREPANCY_DEPTH,
    DISTINCT_NORM_TOLERANCE,
    MAX_MARGIN_ITERATIONS,
    MAX_PROBES,
    PROBE_PITCH_FRACTION,
)
from src.domain.density import UniformTarget
from src.domain.errors import DegenerateInputError, InvalidParameterError
from src.domain.metric import as_points, ball_volume, point_norms
from src.domain.models import Box, NetCertificate, NetWindow, require_radius
from src.domain.protocols import DensityTarget

logger = logging.getLogger(__name__)


def integer_lattice_window(
    dim: int,
    window_radius: float,
    scale: float = 1.0,
    offset: tuple[float, ...] | None = None,
    label: str | None = None,
) -> NetWindow:
    """格子 scale·ℤ^d + offset の窓 B̄(0, window_radius) を返します。

    Args:
        dim: 次元 d
        window_radius: 窓の半径 R_max
        scale: 格子の間隔
        offset: 平行移動ベクトル(省略時は原点)
        label: ラベル(省略時は自動生成)

    Returns:
        辞書式順に並んだ NetWindow

    Raises:
        InvalidParameterError: scale または window_radius が正でない場合

    Examples:
        >>> integer_lattice_window(dim=1, window_radius=3.0, scale=2.0).points.ravel().tolist()
        [-2.0, 0.0, 2.0]
        >>> len(integer_lattice_window(dim=2, window_radius=2.0))
        13
    """
    if scale <= 0 or window_radius <= 0:
        msg = (
            f"scale と window_radius は正である必要があります: "
            f"scale={scale}, R_max={window_radius}"
        )
        raise InvalidParameterError(msg)
    shift = np.zeros(dim) if offset is None else np.asarray(offset, dtype=np.float64)
    if shift.shape != (dim,):
        msg = f"offset の次元が {dim} ではありません: {offset}"
        raise InvalidParameterError(msg)

    axes = [
        np.arange(
            math.ceil((-window_radius - shift[axis]) / scale - BALL_TOLERANCE),
            math.floor((window_radius - shift[axis]) / scale + BALL_TOLERANCE) + 1,
        )
        for axis in range(dim)
    ]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    points = grid * scale + shift
    points = points[point_norms(points) <= window_radius + BALL_TOLERANCE]
    return NetWindow(
        dim=dim,
        points=points,
        window_radius=window_radius,
        label=label if label is not None else f"{scale}·Z^{dim}",
    )


def layer_gap(window: NetWindow) -> float:
    """連続する相異なるノルムの最大ギャップを返します(ℓ₀ = 0 を先頭に含む)。

    Examples:
        >>> layer_gap(integer_lattice_window(dim=1, window_radius=10.0, scale=2.0))
        2.0
    """
    norms = window.sorted_norms
    if len(norms) == 0:
        return 0.0
    distinct = norms[np.concatenate(([True], np.diff(norms) > DISTINCT_NORM_TOLERANCE))]
    layers = np.concatenate(([0.0], distinct))
    return float(np.max(np.diff(layers))) if len(layers) > 1 else 0.0


def _probe_grid(dim: int, radius: float, pitch: float) -> np.ndarray:
    """格子 pitch·ℤ^d のうち閉球 B̄(0, radius) 内の点を返します。"""
    steps = int(math.floor(radius / pitch))
    axis = np.arange(-steps, steps + 1) * pitch
    grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return grid[point_norms(grid) <= radius]


def certify(window: NetWindow, probe_radius: float | None = None) -> NetCertificate:
    """窓の分離定数・ネット定数・層間ギャップを計算します。

    ネット定数は間隔 separation/4 のプローブ格子で推定します。窓の境界から
    現在の推定値より遠いプローブだけを使い、推定値がマージンに収まるまで
    マージンを広げ直します。プローブ数が上限を超える場合は原点中心の
    小さい球に領域を縮め、その半径を証明書に記録します。

    Args:
        window: 対象の窓(2点以上)
        probe_radius: プローブ領域の半径(省略時は窓の半径)

    Returns:
        NetCertificate

    Raises:
        DegenerateInputError: 点が2個未満、または境界マージンを取ると
            プローブが残らない場合

    Examples:
        >>> cert = certify(integer_lattice_window(dim=1, window_radius=10.0))
        >>> cert.separation, cert.net_constant, cert.layer_gap
        (1.0, 0.5, 1.0)
    """
    if len(window) < 2:  # noqa: PLR2004
        msg = f"証明書の計算には2点以上が必要ですが、{len(window)}点しかありません"
        raise DegenerateInputError(msg)

    tree = cKDTree(window.points)
    pair_distances, _ = tree.query(window.points, k=2)
    separation = float(pair_distances[:, 1].min())

    pitch = separation * PROBE_PITCH_FRACTION
    radius = window.window_radius
    if probe_radius is not None:
        radius = min(probe_radius, radius)
    cap = (MAX_PROBES * pitch**window.dim / ball_volume(window.dim, 1.0)) ** (1.0 / window.dim)
    if radius > cap:
        logger.debug("プローブ半径を %.6g から %.6g に縮めます", radius, cap)
        radius = cap

    probes = _probe_grid(window.dim, radius, pitch)
    nearest, _ = tree.query(probes)
    probe_norms = point_norms(probes)

    margin = separation
    net_constant = 0.0
    for _ in range(MAX_MARGIN_ITERATIONS):
        interior = probe_norms < window.window_radius - margin
        if not np.any(interior):
            msg = f"境界マージン {margin} を取るとプローブ点が残りません(窓 '{window.label}')"
            raise DegenerateInputError(msg)
        net_constant = float(nearest[interior].max())
        if net_constant <= margin:
            break
        margin = net_constant
    else:
        logger.warning("ネット定数のマージンが収束しませんでした: %s", window.label)

    return NetCertificate(
        separation=separation,
        net_constant=net_constant,
        layer_gap=layer_gap(window),
        boundary_margin=margin,
        probe_radius=float(radius),
        probe_count=int(len(probes)),
    )


def net_constant_in_box(
    points: np.ndarray, lo: tuple[float, ...], hi: tuple[float, ...], pitch: float
) -> float:
    """閉じた箱 [lo, hi] 上のプローブ格子から最寄り点までの距離の最大値。

    Args:
        points: 点集合 (n, d)
        lo: 箱の下端
        hi: 箱の上端
        pitch: プローブ格子の間隔

    Raises:
        DegenerateInputError: 点集合が空の場合
        InvalidParameterError: pitch が正でない場合
    """
    points = as_points(points, len(lo))
    if len(points) == 0:
        msg = "点集合が空です"
        raise DegenerateInputError(msg)
    if pitch <= 0:
        msg = f"プローブ間隔は正である必要がありますが、{pitch}が指定されました"
        raise InvalidParameterError(msg)
    axes = [np.append(np.arange(a, b, pitch), b) for a, b in zip(lo, hi, strict=True)]
    probes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    nearest, _ = cKDTree(points).query(probes)
    return float(nearest.max())


def ball_count(window: NetWindow, radius: float) -> int:
    """|W ∩ B̄(0, radius)| を返します(許容誤差 1e-9 の閉球)。

    Raises:
        IncompleteWindowError: radius が窓の完全性半径を超える場合

    Examples:
        >>> lattice = integer_lattice_window(dim=1, window_radius=10.0)
        >>> ball_count(lattice, 2.5)
        5
    """
    require_radius(window, radius)
    return int(np.searchsorted(window.sorted_norms, radius + BALL_TOLERANCE, side="right"))


def natural_density_curve(window: NetWindow, radii: list[float]) -> list[tuple[float, float]]:
    """自然密度の推定値 α̂(R) = |W ∩ B̄(0,R)| / 𝓛(B̄(0,R)) の曲線を返します。

    Raises:
        InvalidParameterError: 正でない半径が含まれる場合
        IncompleteWindowError: 窓の外の半径が含まれる場合

    Examples:
        >>> lattice = integer_lattice_window(dim=1, window_radius=100.0)
        >>> natural_density_curve(lattice, [100.0])
        [(100.0, 1.005)]
    """
    curve: list[tuple[float, float]] = []
    for radius in radii:
        if radius <= 0:
            msg = f"半径は正である必要がありますが、{radius}が指定されました"
            raise InvalidParameterError(msg)
        curve.append((float(radius), ball_count(window, radius) / ball_volume(window.dim, radius)))
    return curve


def dyadic_boxes(dim: int, depth: int = DISCREPANCY_DEPTH) -> list[Box]:
    """単位球に内接する立方体 [−1/√d, 1/√d]^d の二進細分(レベル 0..depth)。

    Examples:
        >>> len(dyadic_boxes(dim=2, depth=1))
        5
    """
    if dim <= 0 or depth < 0:
        msg = f"次元は正、深さは非負である必要があります: dim={dim}, depth={depth}"
        raise InvalidParameterError(msg)
    half = 1.0 / math.sqrt(dim)
    boxes: list[Box] = []
    for level in range(depth + 1):
        cells = 2**level
        edges = np.linspace(-half, half, cells + 1)
        for index in itertools.product(range(cells), repeat=dim):
            boxes.append(
                Box(
                    lo=tuple(float(edges[i]) for i in index),
                    hi=tuple(float(edges[i + 1]) for i in index),
                )
            )
    return boxes


def counting_measure_discrepancy(
    window: NetWindow,
    radius: float,
    test_sets: list[Box] | None = None,
    target: DensityTarget | None = None,
) -> float:
    """正規化計数測度 μ_R(S) = |RS ∩ W| / R^d と目標測度の最大の差を返します。

    Args:
        window: 対象の窓
        radius: 評価する半径 R(R ≤ 窓の半径)
        test_sets: 単位球内の箱の族(省略時は dyadic_boxes)
        target: 目標測度(省略時は一様密度 1)

    Returns:
        max_S |μ_R(S) − target(S)|

    Raises:
        InvalidParameterError: 箱の族が空、単位球の外の箱を含む、または R ≤ 0 の場合
        IncompleteWindowError: R が窓の完全性半径を超える場合
    """
    require_radius(window, radius)
    if radius <= 0:
        msg = f"半径は正である必要がありますが、{radius}が指定されました"
        raise InvalidParameterError(msg)
    boxes = dyadic_boxes(window.dim) if test_sets is None else test_sets
    if not boxes:
        msg = "テスト集合の族が空です"
        raise InvalidParameterError(msg)
    outside = [box for box in boxes if box.farthest_corner_norm > 1.0 + BALL_TOLERANCE]
    if outside:
        msg = f"単位球の外にはみ出す箱があります: {outside[0]}"
        raise InvalidParameterError(msg)
    measure = UniformTarget() if target is None else target

    scaled = window.points[window.within(radius)] / radius
    normalizer = radius**window.dim
    return max(
        abs(float(np.count_nonzero(box.contains(scaled))) / normalizer - measure.integrate_box(box))
        for box in boxes
    )
