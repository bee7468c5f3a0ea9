"""ドメイン層のモデル定義。

このモジュールは、有限窓上の検証で使用される中心的なドメインモデルを定義します:
- Box: 単位球内の軸平行な箱(不一致度のテスト集合)
- NetWindow: 閉球 B̄(0, R_max) 内で完全な点集合のスナップショット
- NetCertificate: 分離定数・ネット定数・層間ギャップ
- ExplicitMap: 点ごとの対応 (x, f(x)) として保存された写像
- CurveKind / DisplacementCurve: サンプルされた R ↦ disp_R(f) と上下界
- Matching: 始点と終点の単射的なペア
- CountingBound: 数え上げによる変位の下界
"""

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property

import numpy as np

from src.domain.constants import BALL_TOLERANCE
from src.domain.errors import (
    IncompleteMapError,
    IncompleteWindowError,
    InvalidParameterError,
)
from src.domain.metric import as_points, pair_distances, point_norms


def _lexicographic(points: np.ndarray) -> np.ndarray:
    """点を辞書式順に並べるインデックスを返します(第1座標が最優先)。"""
    if len(points) == 0:
        return np.arange(0)
    return np.lexsort(points.T[::-1])


def _has_duplicate_rows(sorted_points: np.ndarray) -> bool:
    if len(sorted_points) < 2:  # noqa: PLR2004
        return False
    return bool(np.any(np.all(sorted_points[1:] == sorted_points[:-1], axis=1)))


def _frozen_copy(array: np.ndarray) -> np.ndarray:
    copied = np.array(array, dtype=np.float64, copy=True)
    copied.setflags(write=False)
    return copied


@dataclass(frozen=True)
class Box:
    """軸平行な閉じた箱 [lo, hi]。

    Attributes:
        lo: 下端の座標
        hi: 上端の座標(各成分で lo より大きい)

    Examples:
        >>> box = Box(lo=(0.0, 0.0), hi=(0.5, 0.2))
        >>> round(box.volume, 12)
        0.1
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi) or not self.lo:
            msg = f"箱の次元が一致しません: lo={self.lo}, hi={self.hi}"
            raise InvalidParameterError(msg)
        if any(a >= b for a, b in zip(self.lo, self.hi, strict=True)):
            msg = f"箱は各座標で lo < hi である必要があります: lo={self.lo}, hi={self.hi}"
            raise InvalidParameterError(msg)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    @property
    def farthest_corner_norm(self) -> float:
        """原点から最も遠い頂点までの距離。"""
        extent = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return float(np.sqrt(np.sum(extent * extent)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """各点が閉じた箱に入るかどうかの真偽配列を返します。"""
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((points >= lo) & (points <= hi), axis=1)


@dataclass(frozen=True, eq=False)
class NetWindow:
    """分離ネットの有限窓。

    閉球 B̄(0, window_radius) の中にあるネットの点をすべて保持します。
    点は辞書式順に正規化されるため、下流の出力はすべて決定的です。
    等価性は同一オブジェクトかどうかで判定します(Z = X の特別扱いに使用)。

    Attributes:
        dim: 空間の次元 d
        points: (n, d) 配列。生成時に辞書式順へ並べ替えられ、書き込み禁止になります
        window_radius: 完全性半径 R_max
        label: 任意のラベル

    Examples:
        >>> window = NetWindow(dim=1, points=[[2.0], [0.0], [-1.0]], window_radius=2.0)
        >>> window.points.ravel().tolist()
        [-1.0, 0.0, 2.0]
    """

    dim: int
    points: np.ndarray
    window_radius: float
    label: str = ""

    def __post_init__(self) -> None:
        """点集合を検証し、辞書式順に並べ替えます。

        Raises:
            InvalidParameterError: 次元・半径が不正、点が重複、または窓の外にある場合
        """
        if self.dim <= 0:
            msg = f"次元は正である必要がありますが、{self.dim}が指定されました"
            raise InvalidParameterError(msg)
        if not (np.isfinite(self.window_radius) and self.window_radius > 0):
            msg = f"窓の半径は正である必要がありますが、{self.window_radius}が指定されました"
            raise InvalidParameterError(msg)

        points = as_points(self.points, self.dim)
        if points.ndim != 2 or points.shape[1] != self.dim:  # noqa: PLR2004
            msg = f"点の形状 {points.shape} が次元 {self.dim} と一致しません"
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(points)):
            msg = "点の座標に有限でない値が含まれています"
            raise InvalidParameterError(msg)

        points = points[_lexicographic(points)]
        if _has_duplicate_rows(points):
            msg = "ネットの点は互いに異なる必要があります"
            raise InvalidParameterError(msg)
        if len(points) and float(point_norms(points).max()) > self.window_radius + BALL_TOLERANCE:
            msg = f"半径 {self.window_radius} の窓の外に点があります"
            raise InvalidParameterError(msg)

        object.__setattr__(self, "points", _frozen_copy(points))
        object.__setattr__(self, "window_radius", float(self.window_radius))

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def norms(self) -> np.ndarray:
        """points と同じ順序の各点のノルム。"""
        norms = point_norms(self.points)
        norms.setflags(write=False)
        return norms

    @cached_property
    def sorted_norms(self) -> np.ndarray:
        """昇順に並べたノルム(重複あり)。"""
        norms = np.sort(self.norms)
        norms.setflags(write=False)
        return norms

    def within(self, radius: float) -> np.ndarray:
        """閉球 B̄(0, radius) に入る点の真偽配列を返します。"""
        return self.norms <= radius + BALL_TOLERANCE

    def restricted(self, radius: float, label: str | None = None) -> "NetWindow":
        """より小さい窓 B̄(0, radius) に制限したネットを返します。

        Raises:
            IncompleteWindowError: radius が窓の完全性半径を超える場合
        """
        if radius > self.window_radius + BALL_TOLERANCE:
            msg = f"半径 {radius} は窓の半径 {self.window_radius} を超えています"
            raise IncompleteWindowError(msg)
        return NetWindow(
            dim=self.dim,
            points=self.points[self.within(radius)],
            window_radius=min(radius, self.window_radius),
            label=self.label if label is None else label,
        )

    def scaled(self, factor: float) -> "NetWindow":
        """全体を factor 倍したネットを返します。"""
        if factor <= 0:
            msg = f"倍率は正である必要がありますが、{factor}が指定されました"
            raise InvalidParameterError(msg)
        return NetWindow(
            dim=self.dim,
            points=self.points * factor,
            window_radius=self.window_radius * factor,
            label=f"{factor}·{self.label}",
        )


@dataclass(frozen=True)
class NetCertificate:
    """有限窓に対するネットの定数。

    Attributes:
        separation: 最小の点間距離 s
        net_constant: 境界から十分離れたプローブ点から最寄り点までの距離の最大値 b
        layer_gap: ℓ₀ = 0 を含めた連続する相異なるノルムの最大ギャップ
        boundary_margin: net_constant の計算で使った境界からのマージン
        probe_radius: プローブ領域の半径(プローブ数の上限で縮めた場合は窓より小さい)
        probe_count: 使用したプローブ点の数
    """

    separation: float
    net_constant: float
    layer_gap: float
    boundary_margin: float
    probe_radius: float
    probe_count: int

    def __post_init__(self) -> None:
        if self.separation <= 0:
            msg = f"分離定数は正である必要がありますが、{self.separation}です"
            raise InvalidParameterError(msg)
        if self.layer_gap < 0:
            msg = f"層間ギャップは非負である必要がありますが、{self.layer_gap}です"
            raise InvalidParameterError(msg)


@dataclass(frozen=True, eq=False)
class ExplicitMap:
    """点ごとの対応として保存された単射 f。

    Attributes:
        sources: 定義域の点 (n, d)。始点の辞書式順に正規化されます
        targets: 各始点の像 (n, d)
        domain_radius: ノルムがこの値以下の定義域の点はすべて sources に含まれる
        label: 任意のラベル
    """

    sources: np.ndarray
    targets: np.ndarray
    domain_radius: float
    label: str = ""

    def __post_init__(self) -> None:
        """形状と単射性を検証し、始点の辞書式順に並べ替えます。

        Raises:
            InvalidParameterError: 形状が一致しない、または単射でない場合
        """
        sources = as_points(self.sources)
        dim = sources.shape[1] if sources.ndim == 2 else None  # noqa: PLR2004
        targets = as_points(self.targets, dim)
        if sources.shape != targets.shape:
            msg = f"始点 {sources.shape} と像 {targets.shape} の形状が一致しません"
            raise InvalidParameterError(msg)
        if self.domain_radius < 0:
            msg = f"定義域の半径は非負である必要がありますが、{self.domain_radius}です"
            raise InvalidParameterError(msg)

        order = _lexicographic(sources)
        sources = sources[order]
        targets = targets[order]
        if _has_duplicate_rows(sources):
            msg = "写像の始点が重複しています"
            raise InvalidParameterError(msg)
        if _has_duplicate_rows(targets[_lexicographic(targets)]):
            msg = "写像が単射ではありません(像が重複しています)"
            raise InvalidParameterError(msg)

        object.__setattr__(self, "sources", _frozen_copy(sources))
        object.__setattr__(self, "targets", _frozen_copy(targets))
        object.__setattr__(self, "domain_radius", float(self.domain_radius))

    def __len__(self) -> int:
        return len(self.sources)

    @property
    def dim(self) -> int:
        return int(self.sources.shape[1])

    @cached_property
    def displacements(self) -> np.ndarray:
        """各始点の変位 ‖f(x) − x‖。"""
        return pair_distances(self.targets, self.sources)

    def inverse(self, domain_radius: float, label: str | None = None) -> "ExplicitMap":
        """逆写像を返します。

        Args:
            domain_radius: 逆写像の定義域(元の像側の窓)で完全な半径
            label: ラベル。省略時は元のラベルに ⁻¹ を付けます
        """
        return ExplicitMap(
            sources=self.targets,
            targets=self.sources,
            domain_radius=domain_radius,
            label=f"{self.label}⁻¹" if label is None else label,
        )

    def compose(self, outer: "ExplicitMap", label: str | None = None) -> "ExplicitMap":
        """合成 outer ∘ self を返します。

        domain_radius 以内の始点はすべて outer で像を持つ必要があります。
        それより外側で像を持たない始点は落とします。

        Raises:
            IncompleteMapError: 定義域内の点の像が outer の始点にない場合
        """
        lookup = {tuple(row): index for index, row in enumerate(outer.sources.tolist())}
        keep: list[int] = []
        images: list[int] = []
        inner_norms = point_norms(self.sources)
        for index, row in enumerate(self.targets.tolist()):
            position = lookup.get(tuple(row))
            if position is None:
                if inner_norms[index] <= self.domain_radius + BALL_TOLERANCE:
                    point = self.sources[index].tolist()
                    msg = f"点 {point} の像 {row} が外側の写像の定義域にありません"
                    raise IncompleteMapError(msg)
                continue
            keep.append(index)
            images.append(position)
        return ExplicitMap(
            sources=self.sources[keep],
            targets=outer.targets[images],
            domain_radius=self.domain_radius,
            label=f"{outer.label}∘{self.label}" if label is None else label,
        )


class CurveKind(StrEnum):
    """変位曲線の種類。"""

    EXACT = "exact-of-map"
    COUNTING_LOWER_BOUND = "counting-lower-bound"
    BOTTLENECK_OPTIMAL = "bottleneck-optimal"
    ANALYTIC_UPPER_BOUND = "analytic-upper-bound"


_MONOTONE_KINDS = frozenset({CurveKind.EXACT, CurveKind.COUNTING_LOWER_BOUND})


@dataclass(frozen=True)
class DisplacementCurve:
    """サンプルされた変位曲線 R ↦ value。

    サンプル間は右連続な階段関数として補間します。

    Attributes:
        radii: 狭義単調増加な半径
        values: 各半径での値(非負)
        kind: 曲線の種類
        label: 任意のラベル
        truncated: 定義域不足でサンプルを打ち切った場合 True
        params: 付随する定数(例: ("c_phi", √2))
    """

    radii: tuple[float, ...]
    values: tuple[float, ...]
    kind: CurveKind
    label: str = ""
    truncated: bool = False
    params: tuple[tuple[str, float], ...] = field(default=())

    def __post_init__(self) -> None:
        """サンプルの整合性を検証します。

        Raises:
            InvalidParameterError: 長さ不一致、半径が単調増加でない、
                または単調であるべき曲線が減少している場合
        """
        radii = tuple(float(r) for r in self.radii)
        values = tuple(float(v) for v in self.values)
        if len(radii) != len(values):
            msg = f"半径 {len(radii)} 個と値 {len(values)} 個の数が一致しません"
            raise InvalidParameterError(msg)
        if any(b <= a for a, b in zip(radii, radii[1:], strict=False)):
            msg = "曲線の半径は狭義単調増加である必要があります"
            raise InvalidParameterError(msg)
        if any(v < 0 or not np.isfinite(v) for v in values):
            msg = "曲線の値は非負の有限値である必要があります"
            raise InvalidParameterError(msg)
        if self.kind in _MONOTONE_KINDS and any(
            b < a for a, b in zip(values, values[1:], strict=False)
        ):
            msg = f"{self.kind} の曲線は単調非減少である必要があります"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.radii)

    @property
    def max_radius(self) -> float:
        return self.radii[-1] if self.radii else 0.0

    @cached_property
    def _radii_array(self) -> np.ndarray:
        return np.asarray(self.radii, dtype=np.float64)

    @cached_property
    def _values_array(self) -> np.ndarray:
        return np.concatenate(([0.0], np.asarray(self.values, dtype=np.float64)))

    def at(self, radius: float) -> float:
        """右連続な階段補間で値を返します(最初のサンプルより前は 0)。"""
        return float(self.at_many([radius])[0])

    def at_many(self, radii: list[float] | tuple[float, ...] | np.ndarray) -> np.ndarray:
        """at をまとめて評価します。

        Examples:
            >>> curve = DisplacementCurve((1.0, 2.0), (3.0, 4.0), CurveKind.EXACT)
            >>> curve.at_many([0.5, 1.0, 5.0]).tolist()
            [0.0, 3.0, 4.0]
        """
        queries = np.asarray(radii, dtype=np.float64) + BALL_TOLERANCE
        index = np.searchsorted(self._radii_array, queries, side="right")
        return self._values_array[index]

    def param(self, name: str) -> float:
        """名前付き定数を返します。

        Raises:
            KeyError: 定数が存在しない場合
        """
        return dict(self.params)[name]

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.radii, self.values, strict=True))


@dataclass(frozen=True, eq=False)
class Matching:
    """始点と終点の単射的なペア。

    ボトルネック値はペアから毎回再計算するため、保存値と再計算値が
    食い違うことはありません。

    Attributes:
        sources: ペアの始点 (n, d)
        targets: ペアの終点 (n, d)
        complete: すべての始点がマッチしているか
    """

    sources: np.ndarray
    targets: np.ndarray
    complete: bool = True

    def __post_init__(self) -> None:
        sources = as_points(self.sources)
        dim = sources.shape[1] if sources.ndim == 2 else None  # noqa: PLR2004
        targets = as_points(self.targets, dim)
        if sources.shape != targets.shape:
            msg = f"始点 {sources.shape} と終点 {targets.shape} の形状が一致しません"
            raise InvalidParameterError(msg)
        if _has_duplicate_rows(sources[_lexicographic(sources)]) or _has_duplicate_rows(
            targets[_lexicographic(targets)]
        ):
            msg = "マッチングのペアは両側で単射である必要があります"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "sources", _frozen_copy(sources))
        object.__setattr__(self, "targets", _frozen_copy(targets))

    def __len__(self) -> int:
        return len(self.sources)

    @cached_property
    def distances(self) -> np.ndarray:
        return pair_distances(self.sources, self.targets)

    @property
    def bottleneck(self) -> float:
        """ペア距離の最大値(空なら 0)。"""
        return float(self.distances.max()) if len(self) else 0.0

    def as_map(self, domain_radius: float, label: str = "") -> ExplicitMap:
        return ExplicitMap(self.sources, self.targets, domain_radius, label)


@dataclass(frozen=True)
class CountingBound:
    """数え上げによる変位の下界。

    すべての単射 f: Y → Z に対して disp_R(f) ≥ value が成り立ちます。

    Attributes:
        radius: 評価した半径 R
        value: 下界 t
        validity_cap: R + t ≤ Z の窓半径 となる t の上限
        truncated: Z の窓が足りず、下界が上限で打ち切られている場合 True
    """

    radius: float
    value: float
    validity_cap: float
    truncated: bool = False


def require_radius(window: NetWindow, radius: float) -> None:
    """半径が窓の完全性半径以内であることを確認します。

    Raises:
        IncompleteWindowError: radius > window_radius の場合
    """
    if radius > window.window_radius + BALL_TOLERANCE:
        msg = (
            f"半径 {radius} は窓 '{window.label}' の完全性半径 "
            f"{window.window_radius} を超えています"
        )
        raise IncompleteWindowError(msg)


def require_map_radius(mapping: ExplicitMap, radius: float) -> None:
    """半径が写像の定義域半径以内であることを確認します。

    Raises:
        IncompleteMapError: radius > domain_radius の場合
    """
    if radius > mapping.domain_radius + BALL_TOLERANCE:
        msg = (
            f"半径 {radius} で写像 '{mapping.label}' の像が揃っていません"
            f"(定義域 {mapping.domain_radius})"
        )
        raise IncompleteMapError(msg)
