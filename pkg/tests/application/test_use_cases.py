"""Application層（Use Case）のテスト"""

import json

import pytest

from src.application.builders import build_net
from src.application.dto import ExperimentConfig, NetSpec, PhiSpec
from src.application.use_cases import (
    DensityUseCase,
    DisplacementUseCase,
    GenerateNetUseCase,
    VerifySuiteUseCase,
    shared_grid,
)
from src.domain.models import CurveKind


def _config(tmp_path, command="generate", **net):
    return ExperimentConfig(command=command, net=NetSpec(**net), out=tmp_path)


class TestSharedGrid:
    """shared_grid のテストケース"""

    def test_explicit_radii(self, tmp_path):
        """半径が指定されていればそのまま使うこと"""
        config = ExperimentConfig(out=tmp_path, radii=[3.0, 1.0])
        assert shared_grid(config, 100.0) == [1.0, 3.0]

    def test_geometric_grid_with_extra(self, tmp_path):
        """等比数列に窓の内側の追加半径を加えること"""
        config = ExperimentConfig(out=tmp_path, grid_points=3)
        grid = shared_grid(config, 100.0, extra=[5.0, 500.0, 0.0])
        assert grid == pytest.approx([1.0, 5.0, 10.0, 100.0])


class TestGenerateNetUseCase:
    """ネット生成Use Caseのテストケース"""

    def test_lattice(self, tmp_path):
        """整数格子の窓と証明書が書き出されること"""
        result = GenerateNetUseCase().execute(_config(tmp_path, radius=10.0))
        assert result.passed
        assert result.certificate.separation == pytest.approx(1.0)
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["count"] == 317
        assert (tmp_path / "net.json").exists()

    def test_onedim(self, tmp_path):
        """1次元の例では ψ の表と写像が書き出されること"""
        config = _config(tmp_path, family="onedim", dim=1, n_max=4)
        result = GenerateNetUseCase().execute(config)
        assert result.checks["bijective_on_window"]
        assert (tmp_path / "psi.csv").read_text(encoding="utf-8").splitlines()[1:] == [
            "1,0.5",
            "2,1.5",
            "3,6.5",
            "4,32.5",
        ]
        assert (tmp_path / "map.csv").exists()

    def test_patched(self, tmp_path):
        """パッチ付きネットの配置の検査が通ること"""
        result = GenerateNetUseCase().execute(_config(tmp_path, family="patched", sides=[2, 3]))
        assert result.checks["layout_invariants"]
        assert result.checks["patch_counts_match"]
        assert (tmp_path / "layout.json").exists()

    @pytest.mark.slow
    def test_radial(self, tmp_path):
        """動径再配置ではスケジュールとプロファイルが書き出されること"""
        result = GenerateNetUseCase().execute(_config(tmp_path, family="radial", radius=300.0))
        assert result.passed
        assert result.checks["slopes_at_most_one"]
        profile = (tmp_path / "profile.csv").read_text(encoding="utf-8").splitlines()
        assert profile[0] == "R_bar,R,slope"
        assert profile[1].startswith("20.0,16.0,")
        assert (tmp_path / "schedule.csv").exists()


class TestDisplacementUseCase:
    """変位曲線Use Caseのテストケース"""

    @pytest.fixture
    def onedim_result(self, tmp_path):
        config = ExperimentConfig(
            command="displacement",
            net=NetSpec(family="onedim", dim=1, n_max=4, zeta=PhiSpec(expression="linear")),
            out=tmp_path,
            grid_points=8,
        )
        return DisplacementUseCase().execute(config)

    def test_onedim_curves(self, onedim_result):
        """写像と逆写像の厳密な曲線、下界、ボトルネック値が揃うこと"""
        kinds = {curve.kind for curve in onedim_result.curves}
        assert {CurveKind.EXACT, CurveKind.COUNTING_LOWER_BOUND} <= kinds
        assert CurveKind.BOTTLENECK_OPTIMAL in kinds
        forward = onedim_result.curve("f")
        assert all(value <= radius + 1e-9 for radius, value in forward.rows())

    def test_onedim_inverse_blowup(self, onedim_result):
        """逆写像の変位は ψ(n) − ψ(n−1) ≥ n·ζ(ψ(n−1)) 以上であること"""
        _, rows = onedim_result.tables["inverse_blowup"]
        assert [row[0] for row in rows] == [2, 3, 4]
        for _, _, disp, gap, growth in rows:
            assert disp >= gap >= growth

    def test_onedim_incomplete_radii_recorded(self, onedim_result):
        """逆写像の定義域を超える半径は省略として記録されること"""
        assert any(item.curve == "f⁻¹" for item in onedim_result.incomplete)
        with pytest.raises(KeyError):
            onedim_result.curve("missing")

    @pytest.mark.slow
    def test_radial_bounds_against_distinct_reference(self, tmp_path):
        """Z ≠ X では数え上げの下界とボトルネック値を Z に対して計算すること"""
        spec = NetSpec(family="radial", radius=100.0, reference_scale=2.0)
        config = ExperimentConfig(command="displacement", net=spec, out=tmp_path, grid_points=6)
        result = DisplacementUseCase().execute(config)
        comparison = build_net(spec).comparison
        assert comparison is not None
        compared = [
            curve.label
            for curve in result.curves
            if curve.kind in (CurveKind.COUNTING_LOWER_BOUND, CurveKind.BOTTLENECK_OPTIMAL)
        ]
        assert len(compared) == 3
        assert all(comparison.label in label for label in compared)

    def test_artifacts_written(self, onedim_result, tmp_path):
        """曲線・省略・表・写像のCSVが書き出されること"""
        names = {path.name for path in onedim_result.artifacts}
        assert {"curves.csv", "incomplete.csv", "inverse_blowup.csv", "map.csv"} <= names
        header = (tmp_path / "curves.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "R,value,kind,label,truncated,params"

    def test_lattice_uses_linear_bijection(self, tmp_path):
        """写像の無い族では線形変位の全単射を構成すること"""
        config = ExperimentConfig(
            command="displacement",
            net=NetSpec(family="lattice", dim=1, radius=20.0, scale=2.0),
            out=tmp_path,
            grid_points=6,
        )
        result = DisplacementUseCase().execute(config)
        header, rows = result.tables["linear"]
        assert header[0] == "constant"
        assert rows[0][2] > 0
        assert (tmp_path / "linear.csv").exists()

    def test_patched_has_psi_chain_bound(self, tmp_path):
        """パッチ付きネットでは √d·l_n の上界を出力すること"""
        config = ExperimentConfig(
            command="displacement",
            net=NetSpec(family="patched", sides=[2, 3], psi=PhiSpec(expression="linear")),
            out=tmp_path,
            grid_points=6,
        )
        result = DisplacementUseCase().execute(config)
        bound = result.curve("sqrt(d)*l_n")
        exact = result.curve("h")
        assert all(exact.at(r) <= bound.at(r) + 1e-9 for r in exact.radii)


class TestDensityUseCase:
    """密度Use Caseのテストケース"""

    def test_lattice_density(self, tmp_path):
        """ℤ² の α̂(50) が格子点の数から決まること"""
        config = ExperimentConfig(
            command="density", net=NetSpec(radius=50.0), out=tmp_path, radii=[50.0]
        )
        result = DensityUseCase().execute(config)
        assert result.density[0][1] == pytest.approx(7845 / (3.141592653589793 * 2500))
        assert (tmp_path / "density.csv").exists()
        assert (tmp_path / "discrepancy.csv").exists()

    def test_halfspace_limit_measure(self, tmp_path):
        """半空間ネットは極限測度に対する不一致度の方が小さいこと"""
        config = ExperimentConfig(
            command="density",
            net=NetSpec(family="halfspace", radius=80.0, c=1.5),
            out=tmp_path,
            radii=[80.0],
        )
        result = DensityUseCase().execute(config)
        [(_, uniform, limit)] = result.discrepancy
        assert limit < uniform
        assert result.density[0][1] == pytest.approx(1.0, abs=0.1)


class TestVerifySuiteUseCase:
    """検証スイートUse Caseのテストケース"""

    def test_oracle_suite(self, tmp_path):
        """oracleスイートは基準3だけを実行してレポートを書くこと"""
        config = ExperimentConfig(command="verify", suite="oracle", out=tmp_path)
        report = VerifySuiteUseCase().execute(config)
        assert [c.criterion_id for c in report.criteria] == ["3"]
        assert report.passed
        data = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert data["suite"] == "oracle"
        assert data["criteria"][0]["id"] == "3"

    @pytest.mark.slow
    def test_faults_suite(self, tmp_path):
        """faultsスイートでは注入した故障がすべて検出されること"""
        config = ExperimentConfig(command="verify", suite="faults", out=tmp_path)
        report = VerifySuiteUseCase().execute(config)
        assert [c.criterion_id for c in report.criteria] == ["F1", "F2", "F3", "F4"]
        assert report.passed
