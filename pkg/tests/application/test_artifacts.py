"""src/application/artifacts.py のテスト"""

import json

import numpy as np
import pytest

from src.application import artifacts
from src.domain.density import DensityField
from src.domain.growth import GrowthFunction
from src.domain.models import CurveKind, DisplacementCurve, ExplicitMap, Matching
from src.domain.net_core import certify, integer_lattice_window
from src.domain.patched_net import patched_net


class TestRows:
    """write_rows / read_rows のテストケース"""

    def test_floats_written_exactly(self, tmp_path):
        """浮動小数点数はreprで書かれ、読み直すとビット単位で一致すること"""
        value = 0.1 + 0.2
        path = artifacts.write_rows(tmp_path / "rows.csv", ("a", "b", "c"), [(1, value, True)])
        header, rows = artifacts.read_rows(path)
        assert header == ["a", "b", "c"]
        assert rows == [["1", "0.30000000000000004", "true"]]
        assert float(rows[0][1]) == value

    def test_no_temporary_files_left(self, tmp_path):
        """書き出し後に一時ファイルが残らないこと"""
        artifacts.write_rows(tmp_path / "rows.csv", ("a",), [(1,)])
        artifacts.write_json(tmp_path / "data.json", {"b": 1, "a": 2})
        assert sorted(p.name for p in tmp_path.iterdir()) == ["data.json", "rows.csv"]

    def test_creates_parent_directory(self, tmp_path):
        """出力先のディレクトリが作られること"""
        path = artifacts.write_json(tmp_path / "nested" / "out.json", {"x": "ψ"})
        assert json.loads(path.read_text(encoding="utf-8")) == {"x": "ψ"}


class TestWindowArtifacts:
    """write_window / load_window のテストケース"""

    def test_window_with_certificate(self, tmp_path):
        """窓と証明書がJSONに書かれ、点は辞書式順で戻ること"""
        window = integer_lattice_window(2, 3.0)
        path = artifacts.write_window(tmp_path / "net.json", window, certify(window))
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["count"] == len(window)
        assert data["certificate"]["separation"] == pytest.approx(1.0)
        loaded = artifacts.load_window(path)
        assert np.array_equal(loaded.points, window.points)
        assert loaded.label == window.label


class TestCurveArtifacts:
    """write_curves / load_curves のテストケース"""

    def test_long_format(self, tmp_path):
        """曲線ごとに行を並べ、種類・ラベル・打ち切り・定数が戻ること"""
        exact = DisplacementCurve((1.0, 2.0), (0.5, 1.5), CurveKind.EXACT, label="g")
        bound = DisplacementCurve(
            (4.0,),
            (2.0,),
            CurveKind.ANALYTIC_UPPER_BOUND,
            label="C_phi*phi",
            truncated=True,
            params=(("c_phi", 1.4142135623730951), ("r0", 4.0)),
        )
        path = artifacts.write_curves(tmp_path / "curves.csv", [exact, bound])
        header, rows = artifacts.read_rows(path)
        assert tuple(header) == artifacts.CURVE_HEADER
        assert len(rows) == 3
        assert artifacts.load_curves(path) == [exact, bound]

    def test_bad_header_rejected(self, tmp_path):
        """ヘッダが違うCSVは読み込めないこと"""
        path = artifacts.write_rows(tmp_path / "other.csv", ("x", "y"), [(1, 2)])
        with pytest.raises(ValueError, match="ヘッダ"):
            artifacts.load_curves(path)


class TestMapArtifacts:
    """写像・マッチング・配置の書き出しのテストケース"""

    def test_map_columns(self, tmp_path):
        """写像のCSVは座標・像・変位の列を持つこと"""
        mapping = ExplicitMap([[0.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]], 1.0, "f")
        path = artifacts.write_map(tmp_path / "map.csv", mapping)
        header, rows = artifacts.read_rows(path)
        assert header == ["x0", "x1", "fx0", "fx1", "disp"]
        assert rows[0] == ["0.0", "0.0", "0.0", "1.0", "1.0"]
        loaded = artifacts.load_map(path, 1.0, "f")
        assert np.array_equal(loaded.targets, mapping.targets)

    def test_matching_columns(self, tmp_path):
        """マッチングのCSVは始点・終点・距離の列を持つこと"""
        matching = Matching([[0.0], [1.0]], [[0.5], [3.0]])
        path = artifacts.write_matching(tmp_path / "matching.csv", matching)
        header, _ = artifacts.read_rows(path)
        assert header == ["s0", "t0", "dist"]
        assert artifacts.load_matching(path).bottleneck == 2.0

    def test_layout_to_dict(self):
        """有理数の目標値は文字列で書かれること"""
        patched = patched_net(
            DensityField.checkerboard(2, 2, 0.5, 1.5), [2, 4], GrowthFunction.linear()
        )
        layout = artifacts.layout_to_dict(patched.layout)
        assert layout["sides"] == [2, 4]
        assert [cube["k"] for cube in layout["cubes"]] == [1, 2]
        assert layout["cubes"][1]["cell_targets"] == ["2", "6", "6", "2"]
        json.dumps(layout)
