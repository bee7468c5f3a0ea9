"""src/domain/models.py のテスト"""

import numpy as np
import pytest

from src.domain.errors import (
    IncompleteMapError,
    IncompleteWindowError,
    InvalidParameterError,
)
from src.domain.models import (
    Box,
    CurveKind,
    DisplacementCurve,
    ExplicitMap,
    Matching,
    NetWindow,
    require_map_radius,
    require_radius,
)


class TestBox:
    """Box のテスト"""

    def test_volume_and_contains(self):
        """体積と閉じた箱への所属判定"""
        box = Box(lo=(0.0, -0.5), hi=(0.5, 0.5))
        assert box.volume == pytest.approx(0.5)
        inside = box.contains(np.array([[0.5, 0.5], [0.6, 0.0], [0.0, -0.5]]))
        assert inside.tolist() == [True, False, True]

    def test_farthest_corner_norm(self):
        """原点から最も遠い頂点の距離"""
        assert Box(lo=(-0.3, 0.0), hi=(0.1, 0.4)).farthest_corner_norm == pytest.approx(0.5)

    @pytest.mark.parametrize(
        ("lo", "hi"),
        [((0.0,), (0.0,)), ((0.0, 0.0), (1.0,)), ((), ())],
    )
    def test_invalid_box_raises(self, lo, hi):
        """退化した箱や次元の不一致はエラー"""
        with pytest.raises(InvalidParameterError):
            Box(lo=lo, hi=hi)


class TestNetWindow:
    """NetWindow のテスト"""

    def test_points_are_sorted_lexicographically(self):
        """点は辞書式順に並べ替えられ、書き込み禁止になる"""
        window = NetWindow(dim=2, points=[[1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], window_radius=1.0)
        assert window.points.tolist() == [[0.0, -1.0], [0.0, 1.0], [1.0, 0.0]]
        assert not window.points.flags.writeable

    def test_duplicate_points_rejected(self):
        """重複した点はエラー"""
        with pytest.raises(InvalidParameterError, match="互いに異なる"):
            NetWindow(dim=1, points=[[0.0], [0.0]], window_radius=1.0)

    def test_point_outside_window_rejected(self):
        """窓の外の点はエラー"""
        with pytest.raises(InvalidParameterError, match="窓の外"):
            NetWindow(dim=1, points=[[0.0], [2.0]], window_radius=1.5)

    @pytest.mark.parametrize("radius", [0.0, -1.0, float("inf")])
    def test_invalid_radius_rejected(self, radius):
        """窓の半径は正の有限値"""
        with pytest.raises(InvalidParameterError):
            NetWindow(dim=1, points=[[0.0]], window_radius=radius)

    def test_empty_window_allowed(self):
        """空の窓も作れる"""
        window = NetWindow(dim=3, points=[], window_radius=0.5)
        assert len(window) == 0
        assert window.points.shape == (0, 3)

    def test_within_uses_closed_ball(self):
        """within は閉球(境界を含む)"""
        window = NetWindow(dim=1, points=[[-2.0], [0.0], [1.0], [2.0]], window_radius=2.0)
        assert int(window.within(1.0).sum()) == 2
        assert int(window.within(2.0).sum()) == 4

    def test_restricted(self):
        """小さい窓への制限"""
        window = NetWindow(dim=1, points=[[-2.0], [0.0], [1.0], [2.0]], window_radius=2.0)
        small = window.restricted(1.0)
        assert small.window_radius == 1.0
        assert small.points.ravel().tolist() == [0.0, 1.0]

    def test_restricted_beyond_window_raises(self):
        """窓より大きい半径への制限はエラー"""
        window = NetWindow(dim=1, points=[[0.0]], window_radius=1.0)
        with pytest.raises(IncompleteWindowError):
            window.restricted(2.0)

    def test_scaled(self):
        """倍率をかけると点と窓の半径が一緒に伸びる"""
        window = NetWindow(dim=1, points=[[-1.0], [1.0]], window_radius=1.0, label="X")
        scaled = window.scaled(3.0)
        assert scaled.points.ravel().tolist() == [-3.0, 3.0]
        assert scaled.window_radius == 3.0
        with pytest.raises(InvalidParameterError):
            window.scaled(0.0)

    def test_sorted_norms(self):
        """ノルムの昇順"""
        window = NetWindow(dim=2, points=[[3.0, 4.0], [0.0, 1.0]], window_radius=5.0)
        assert window.sorted_norms.tolist() == [1.0, 5.0]


class TestExplicitMap:
    """ExplicitMap のテスト"""

    def test_sources_sorted_with_targets(self):
        """始点の並べ替えに像もついていく"""
        mapping = ExplicitMap(sources=[[1.0], [0.0]], targets=[[5.0], [7.0]], domain_radius=1.0)
        assert mapping.sources.ravel().tolist() == [0.0, 1.0]
        assert mapping.targets.ravel().tolist() == [7.0, 5.0]
        assert mapping.displacements.tolist() == [7.0, 4.0]

    def test_non_injective_rejected(self):
        """像が重複する写像はエラー"""
        with pytest.raises(InvalidParameterError, match="単射"):
            ExplicitMap(sources=[[0.0], [1.0]], targets=[[2.0], [2.0]], domain_radius=1.0)

    def test_shape_mismatch_rejected(self):
        """始点と像の形状が異なるとエラー"""
        with pytest.raises(InvalidParameterError):
            ExplicitMap(sources=[[0.0], [1.0]], targets=[[2.0]], domain_radius=1.0)

    def test_inverse(self):
        """逆写像は始点と像を入れ替える"""
        mapping = ExplicitMap([[0.0], [1.0]], [[1.0], [3.0]], domain_radius=1.0, label="f")
        inverse = mapping.inverse(3.0)
        assert inverse.label == "f⁻¹"
        assert inverse.sources.ravel().tolist() == [1.0, 3.0]
        assert inverse.targets.ravel().tolist() == [0.0, 1.0]

    def test_compose(self):
        """合成 g∘f"""
        f = ExplicitMap([[0.0], [1.0]], [[1.0], [2.0]], domain_radius=1.0, label="f")
        g = ExplicitMap([[1.0], [2.0]], [[10.0], [20.0]], domain_radius=2.0, label="g")
        composed = f.compose(g)
        assert composed.label == "g∘f"
        assert composed.targets.ravel().tolist() == [10.0, 20.0]

    def test_compose_missing_image_inside_domain_raises(self):
        """定義域内の像が外側の写像に無いとエラー"""
        f = ExplicitMap([[0.0], [1.0]], [[1.0], [2.0]], domain_radius=1.0)
        g = ExplicitMap([[1.0]], [[10.0]], domain_radius=1.0)
        with pytest.raises(IncompleteMapError):
            f.compose(g)

    def test_compose_drops_points_outside_domain(self):
        """定義域の外で像の無い点は落とす"""
        f = ExplicitMap([[0.0], [5.0]], [[1.0], [9.0]], domain_radius=1.0)
        g = ExplicitMap([[1.0]], [[10.0]], domain_radius=1.0)
        assert len(f.compose(g)) == 1


class TestDisplacementCurve:
    """DisplacementCurve のテスト"""

    def test_step_interpolation(self):
        """右連続な階段補間"""
        curve = DisplacementCurve((1.0, 2.0, 4.0), (0.0, 1.0, 3.0), CurveKind.EXACT)
        assert curve.at(0.5) == 0.0
        assert curve.at(2.0) == 1.0
        assert curve.at(3.9) == 1.0
        assert curve.at(100.0) == 3.0
        assert curve.max_radius == 4.0

    def test_vectorized_matches_scalar(self):
        """at_many は各半径での at と一致する"""
        curve = DisplacementCurve((1.0, 2.0, 4.0), (0.5, 1.0, 3.0), CurveKind.EXACT)
        queries = [0.0, 1.0, 1.5, 2.0 - 1e-12, 4.0, 9.0]
        assert curve.at_many(queries).tolist() == [curve.at(r) for r in queries]
        assert curve.at_many(queries).tolist() == [0.0, 0.5, 0.5, 1.0, 3.0, 3.0]

    def test_vectorized_on_long_curve(self):
        """長い曲線でも全ての半径をまとめて評価できる"""
        radii = tuple(float(r) for r in range(1, 20_001))
        curve = DisplacementCurve(radii, radii, CurveKind.EXACT)
        values = curve.at_many(np.asarray(radii) + 0.5)
        assert values.shape == (20_000,)
        assert values[0] == 1.0
        assert values[-1] == 20_000.0

    def test_monotone_kind_must_not_decrease(self):
        """厳密な曲線は単調非減少"""
        with pytest.raises(InvalidParameterError, match="単調非減少"):
            DisplacementCurve((1.0, 2.0), (2.0, 1.0), CurveKind.EXACT)

    def test_bottleneck_curve_may_decrease(self):
        """ボトルネック最適値の曲線は減少してもよい"""
        curve = DisplacementCurve((1.0, 2.0), (2.0, 1.0), CurveKind.BOTTLENECK_OPTIMAL)
        assert curve.values == (2.0, 1.0)

    def test_radii_must_increase(self):
        """半径は狭義単調増加"""
        with pytest.raises(InvalidParameterError):
            DisplacementCurve((2.0, 2.0), (0.0, 0.0), CurveKind.ANALYTIC_UPPER_BOUND)

    def test_negative_value_rejected(self):
        """値は非負"""
        with pytest.raises(InvalidParameterError):
            DisplacementCurve((1.0,), (-1.0,), CurveKind.ANALYTIC_UPPER_BOUND)

    def test_param_lookup(self):
        """名前付き定数"""
        curve = DisplacementCurve(
            (1.0,), (1.0,), CurveKind.ANALYTIC_UPPER_BOUND, params=(("c_phi", 2.0),)
        )
        assert curve.param("c_phi") == 2.0
        with pytest.raises(KeyError):
            curve.param("r0")


class TestMatching:
    """Matching のテスト"""

    def test_bottleneck_recomputed_from_pairs(self):
        """ボトルネック値はペア距離の最大"""
        matching = Matching([[0.0], [1.0]], [[0.5], [3.0]])
        assert matching.bottleneck == 2.0
        assert matching.distances.tolist() == [0.5, 2.0]

    def test_empty_matching(self):
        """空のマッチングのボトルネック値は 0"""
        assert Matching(np.zeros((0, 2)), np.zeros((0, 2))).bottleneck == 0.0

    def test_repeated_target_rejected(self):
        """同じ終点を2回使うマッチングはエラー"""
        with pytest.raises(InvalidParameterError):
            Matching([[0.0], [1.0]], [[0.5], [0.5]])

    def test_as_map(self):
        """写像への変換"""
        mapping = Matching([[0.0]], [[1.0]]).as_map(0.0, "m")
        assert mapping.label == "m"
        assert mapping.displacements.tolist() == [1.0]


class TestRequireRadius:
    """require_radius / require_map_radius のテスト"""

    def test_window_radius_check(self):
        """窓の半径を超えるとエラー(許容誤差内は通る)"""
        window = NetWindow(dim=1, points=[[0.0]], window_radius=1.0)
        require_radius(window, 1.0 + 1e-12)
        with pytest.raises(IncompleteWindowError):
            require_radius(window, 1.1)

    def test_map_radius_check(self):
        """写像の定義域を超えるとエラー"""
        mapping = ExplicitMap([[0.0]], [[1.0]], domain_radius=0.5)
        with pytest.raises(IncompleteMapError):
            require_map_radius(mapping, 1.0)
