"""src/application/acceptance.py のテスト

大きな窓を使う基準は slow マーカー付きです。
"""

import dataclasses

import numpy as np
import pytest

from src.application import acceptance
from src.application.acceptance import (
    CRITERIA,
    FAULTS,
    CriterionResult,
    run_criterion,
    run_faults,
)
from src.domain.errors import InvalidParameterError


class TestCriterionResult:
    """CriterionResult のテストケース"""

    def test_to_dict(self):
        """番号は id、時間は小数3桁で出力されること"""
        result = CriterionResult("3", "oracle-equivalence", True, {"d=1": "200/200"})
        data = result.timed(1.23456).to_dict()
        assert data == {
            "id": "3",
            "name": "oracle-equivalence",
            "passed": True,
            "details": {"d=1": "200/200"},
            "seconds": 1.235,
        }

    def test_timed_returns_copy(self):
        """timedは元の結果を変更しないこと"""
        result = CriterionResult("1", "x", passed=False)
        assert result.timed(2.0).seconds == 2.0
        assert result.seconds == 0.0


class TestRunCriterion:
    """run_criterion のテストケース"""

    def test_all_criteria_registered(self):
        """基準1..10が登録されていること"""
        assert sorted(CRITERIA) == list(range(1, 11))

    def test_unknown_criterion(self):
        """存在しない番号はKeyErrorになること"""
        with pytest.raises(KeyError):
            run_criterion(11, seed=7)

    def test_domain_error_becomes_failure(self, monkeypatch):
        """ドメイン例外は失敗として詳細に記録されること"""

        def broken(_seed):
            msg = "壊れています"
            raise InvalidParameterError(msg)

        monkeypatch.setitem(CRITERIA, 1, ("broken", broken))
        result = run_criterion(1, seed=7)
        assert not result.passed
        assert result.details["error"].startswith("InvalidParameterError")


class TestFastCriteria:
    """小さな窓で済む基準のテストケース"""

    def test_oracle_equivalence(self):
        """乱択インスタンスで総当たりと全件一致すること"""
        passed, details = acceptance.oracle_equivalence(7)
        assert passed
        assert details == {"d=1": "200/200", "d=2": "200/200"}

    def test_dyadic_placement(self):
        """二進配置の点数・丸め・一様性がすべて成り立つこと"""
        passed, details = acceptance.dyadic_placement_check(7)
        assert passed
        for name in ("uniform", "checkerboard"):
            assert details[name]["separation_ratio"] <= 2.0 + 1e-9
            assert details[name]["net_constant_ratio"] < 2.0
        assert len(details["checkerboard"]["rows"]) == len(acceptance.PLACEMENT_SIDES)

    def test_unbalanced_placement_fails_on_net_constant(self, monkeypatch):
        """最大の S_k で点を片側に寄せるとネット定数の比で落ちること"""
        original = acceptance.dyadic_placement

        def lopsided(rho, side, patch):
            placement = original(rho, side, patch)
            if side != max(acceptance.PLACEMENT_SIDES):
                return placement
            squeezed = patch.lo + (placement.points - patch.lo) * np.array([0.5, 1.0])
            return dataclasses.replace(placement, points=squeezed)

        monkeypatch.setattr(acceptance, "dyadic_placement", lopsided)
        passed, details = acceptance.dyadic_placement_check(7)
        assert not passed
        assert details["uniform"]["net_constant_ratio"] >= 2.0
        assert not details["uniform"]["ok"]

    def test_patch_bijection_bound(self):
        """パッチ全単射の変位が √d·l_n 以下であること"""
        passed, details = acceptance.patch_bijection_bound(7)
        assert passed
        assert details["max_excess_over_bound"] <= 1e-9

    def test_onedim_counterexample(self):
        """順方向は線形、逆方向は ζ より速く増えること"""
        passed, details = acceptance.onedim_counterexample_check(7)
        assert passed
        assert [row["n"] for row in details["rows"]] == list(range(2, 9))
        assert details["rows"][-1]["psi_n_minus_1"] == "21897/2"


class TestFaults:
    """故障注入のテストケース"""

    @pytest.mark.parametrize("fault_id", ["F2", "F3", "F4"])
    def test_small_faults_detected(self, fault_id):
        """小さな構成での故障が検出されること"""
        _, inject = FAULTS[fault_id]
        detected, _ = inject()
        assert detected

    @pytest.mark.slow
    def test_all_faults_detected(self):
        """すべての故障が検出されること"""
        results = run_faults()
        assert [r.criterion_id for r in results] == ["F1", "F2", "F3", "F4"]
        assert all(r.passed for r in results)
        assert results[0].details["violations"] == [1]


@pytest.mark.slow
class TestLargeWindowCriteria:
    """ℤ² ∩ B̄(0, 600) などの大きな窓を使う基準のテストケース"""

    def test_radial_upper_bound(self):
        """スケジュール (16, 256) で disp ≤ φ(R_i) が成り立つこと"""
        passed, details = acceptance.radial_upper_bound(7)
        assert passed
        assert details["schedule_ok"]

    def test_radial_lower_bound(self):
        """数え上げの下界とボトルネック最適値が φ(R_i) − s 以上であること"""
        passed, details = acceptance.radial_lower_bound(7)
        assert passed
        assert details["bottleneck"] >= details["counting_at_R1"] - 1e-9

    def test_slope_certificate(self):
        """プロファイルの傾きが範囲内であること"""
        passed, details = acceptance.slope_certificate(7)
        assert passed
        assert details["violations"] == []

    def test_density_falsifier(self):
        """半空間ネットの α̂ は 1 に近いが、箱の不一致度は 0.05 付近に残ること"""
        passed, details = acceptance.density_falsifier(7)
        assert passed
        assert details["target"] == pytest.approx(0.05)

    def test_class_separation(self):
        """√R の下界が ln(e+R) の上界を上回ること"""
        passed, details = acceptance.class_separation(7)
        assert passed
        assert all(row["gap"] > 0 for row in details["rows"])

    def test_inverse_bound_calculus(self):
        """g⁻¹ の曲線が C_φ·φ(R) 以下であること"""
        passed, details = acceptance.inverse_bound_calculus(7)
        assert passed
        assert details["r0"] == 4.0

    @pytest.mark.parametrize(
        ("criterion_id", "budget"),
        [(1, 10.0), (2, 60.0), (4, 10.0), (8, 30.0), (9, 60.0), (10, 5.0)],
    )
    def test_runtime_budget(self, criterion_id, budget):
        """大きな窓の基準も所定の時間内に終わること"""
        result = run_criterion(criterion_id, 7)
        assert result.passed
        assert result.seconds < budget
