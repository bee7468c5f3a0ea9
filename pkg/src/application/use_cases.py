"""アプリケーション層のユースケース。

このモジュールは、ネットの生成・変位曲線の計算・密度の推定・受け入れ検証の
パイプラインを調整する Use Case クラスを定義します。各ユースケースは
ドメイン関数を組み合わせて結果を計算し、CSV/JSON 成果物を書き出します。
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.application import artifacts
from src.application.acceptance import CriterionResult, run_criterion, run_faults
from src.application.builders import BuiltNet, build_net
from src.application.dto import ExperimentConfig
from src.domain.constants import BALL_TOLERANCE, BOTTLENECK_MAX_POINTS, SLOPE_TOLERANCE
from src.domain.displacement import counting_lower_curve, displacement_curve, inverse_curve_bound
from src.domain.errors import PreconditionViolatedError
from src.domain.growth import GrowthFunction
from src.domain.matching import bottleneck_curve, linear_displacement_bijection
from src.domain.models import CurveKind, DisplacementCurve, NetCertificate, NetWindow
from src.domain.net_core import (
    ball_count,
    certify,
    counting_measure_discrepancy,
    natural_density_curve,
)
from src.domain.patched_net import layout_violations, patch_points_in_lattice_count, psi_chain_bound
from src.domain.radial_rescale import RadialProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IncompleteRadius:
    """窓が足りず計算できなかった半径。"""

    curve: str
    radius: float
    reason: str


@dataclass(frozen=True)
class GenerateResult:
    """GenerateNetUseCase の結果。

    Attributes:
        built: 組み立てたネット
        certificate: ネットの証明書
        checks: 族ごとの検査結果(名前 → 成否)
        artifacts: 書き出したファイル
    """

    built: BuiltNet
    certificate: NetCertificate
    checks: dict[str, bool]
    artifacts: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass(frozen=True)
class DisplacementResult:
    """DisplacementUseCase の結果。

    Attributes:
        curves: 共有の半径グリッド上の曲線
        incomplete: 窓が足りず省略した (曲線, 半径)
        tables: 付随する表(名前 → (ヘッダ, 行))
        artifacts: 書き出したファイル
    """

    curves: list[DisplacementCurve]
    incomplete: list[IncompleteRadius]
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]]
    artifacts: list[Path] = field(default_factory=list)

    def curve(self, label: str) -> DisplacementCurve:
        """ラベルで曲線を取り出します。

        Raises:
            KeyError: 該当する曲線が無い場合
        """
        for curve in self.curves:
            if curve.label == label:
                return curve
        raise KeyError(label)


@dataclass(frozen=True)
class DensityResult:
    """DensityUseCase の結果。

    Attributes:
        density: (R, α̂(R)) の列
        discrepancy: (R, 一様測度との差, 極限測度との差) の列
        artifacts: 書き出したファイル
    """

    density: list[tuple[float, float]]
    discrepancy: list[tuple[float, float, float]]
    artifacts: list[Path] = field(default_factory=list)


@dataclass(frozen=True)
class SuiteReport:
    """検証スイートの結果。"""

    suite: str
    criteria: list[CriterionResult]
    artifacts: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "criteria": [c.to_dict() for c in self.criteria],
        }


def _split_radii(
    grid: list[float], limit: float, curve: str, incomplete: list[IncompleteRadius]
) -> list[float]:
    """limit 以内の半径を返し、それ以外を incomplete に記録します。"""
    kept = [r for r in grid if r <= limit + BALL_TOLERANCE]
    incomplete.extend(
        IncompleteRadius(curve, r, f"窓の半径 {limit:.6g} を超えています")
        for r in grid
        if r > limit + BALL_TOLERANCE
    )
    return kept


def shared_grid(
    config: ExperimentConfig, limit: float, extra: list[float] | None = None
) -> list[float]:
    """共有の半径グリッド(指定がなければ [1, limit] の等比数列と extra の和)。"""
    if config.radii is not None:
        return list(config.radii)
    lower = min(1.0, limit)
    base = np.geomspace(lower, limit, config.grid_points).tolist()
    points = {float(r) for r in base} | {float(r) for r in (extra or []) if 0 < r <= limit}
    return sorted(points)


def _rbar_counts_ok(
    x_net: NetWindow, z_net: NetWindow, phi: GrowthFunction, profile: RadialProfile
) -> bool:
    """全ての i で |X ∩ B̄(0, R̄_i)| ≥ |Z ∩ B̄(0, R_i + φ(R_i))| か。"""
    return all(
        ball_count(x_net, outer) >= ball_count(z_net, inner + phi(inner))
        for outer, inner in zip(profile.outer[1:], profile.inner[1:], strict=True)
    )


class GenerateNetUseCase:
    """ネットを生成し、証明書と族ごとの検査結果を書き出すUse Case。

    このクラスは次のパイプラインを調整します:
    1. NetSpec からネットを組み立てる
    2. 証明書(分離定数・ネット定数・層間ギャップ)を計算する
    3. 族ごとの不変条件を検査する
    4. 窓・証明書・付随する表を書き出す

    Examples:
        >>> config = ExperimentConfig(out=Path("out"))
        >>> result = GenerateNetUseCase().execute(config)
        >>> result.passed
        True
    """

    def execute(self, config: ExperimentConfig) -> GenerateResult:
        """生成を実行します。

        Raises:
            NetLabError: 構成の前提が成り立たない場合
        """
        # ステップ1: ネットを組み立てる
        built = build_net(config.net)
        net = built.net

        # ステップ2: 証明書を計算する
        certificate = certify(net)

        # ステップ3: 族ごとの不変条件を検査する
        checks = {"ball_count": ball_count(net, net.window_radius) == len(net)}
        if built.profile is not None:
            slopes = built.profile.slopes
            if built.comparison is None:
                checks["slopes_at_most_one"] = all(c <= 1 + SLOPE_TOLERANCE for c in slopes)
            elif built.phi is not None:
                checks["rbar_counts"] = _rbar_counts_ok(
                    built.reference, built.comparison, built.phi, built.profile
                )
        if built.layout is not None:
            checks["layout_invariants"] = not layout_violations(built.layout)
            counts = patch_points_in_lattice_count(built.layout, net)
            checks["patch_counts_match"] = all(a == b for a, b in counts)
        if built.family == "onedim" and built.mapping is not None:
            checks["bijective_on_window"] = len(built.mapping) == len(built.reference) == len(net)
        for name, ok in checks.items():
            logger.info("検査 %s: %s", name, "OK" if ok else "NG")

        # ステップ4: 成果物を書き出す
        out = config.out
        written = [artifacts.write_window(out / "net.json", net, certificate)]
        if built.schedule is not None and built.profile is not None:
            written.append(artifacts.write_schedule(out / "schedule.csv", built.schedule))
            profile_rows = [
                (r_bar, r, slope)
                for r_bar, r, slope in zip(
                    built.profile.outer[1:],
                    built.profile.inner[1:],
                    built.profile.slopes,
                    strict=True,
                )
            ]
            profile_header = ("R_bar", "R", "slope")
            written.append(artifacts.write_rows(out / "profile.csv", profile_header, profile_rows))
        if built.layout is not None:
            layout = artifacts.layout_to_dict(built.layout)
            written.append(artifacts.write_json(out / "layout.json", layout))
        if built.psi:
            psi_rows = [(n, value) for n, value in enumerate(built.psi, start=1)]
            written.append(artifacts.write_rows(out / "psi.csv", ("n", "psi_n"), psi_rows))
        if built.mapping is not None:
            written.append(artifacts.write_map(out / "map.csv", built.mapping))
        summary = {
            "family": built.family,
            "label": net.label,
            "count": len(net),
            "window_radius": net.window_radius,
            "certificate": artifacts.certificate_to_dict(certificate),
            "checks": checks,
        }
        written.append(artifacts.write_json(out / "summary.json", summary))
        logger.info("%d 個の成果物を %s に書き出しました", len(written), out)
        return GenerateResult(
            built=built, certificate=certificate, checks=checks, artifacts=written
        )


class DisplacementUseCase:
    """変位曲線と上下界を共有の半径グリッド上で計算するUse Case。

    明示的な写像がある族では、その写像と逆写像の厳密な曲線、数え上げによる
    下界、窓上のボトルネック最適値、解析的な上界を出力します。写像の無い族では
    線形変位の全単射を構成して同じ量を出力します。
    """

    def execute(self, config: ExperimentConfig) -> DisplacementResult:
        """変位の計算を実行します。

        Raises:
            NetLabError: 構成の前提が成り立たない場合
        """
        # ステップ1: ネットと写像を用意する
        built = build_net(config.net)
        incomplete: list[IncompleteRadius] = []
        tables: dict[str, tuple[tuple[str, ...], list[tuple]]] = {}

        if built.mapping is None:
            bijection = linear_displacement_bijection(built.reference, built.net)
            domain = max(bijection.truncation_radius - BALL_TOLERANCE, 0.0)
            forward = bijection.matching.as_map(domain, "h")
            inverse = forward.inverse(domain)
            source, target = built.reference, built.net
            tables["linear"] = (
                ("constant", "component_constant", "truncation_radius", "r", "r_prime"),
                [
                    (
                        bijection.constant,
                        bijection.component_constant,
                        bijection.truncation_radius,
                        bijection.forward_scale,
                        bijection.backward_scale,
                    )
                ],
            )
        else:
            forward = built.mapping
            if built.family == "patched":
                source, target = built.net, built.reference
            else:
                source, target = built.reference, built.net
            inverse = forward.inverse(target.window_radius)

        # ステップ2: 共有の半径グリッドを作る
        extra: list[float] = list(built.psi)
        if built.schedule is not None and built.profile is not None:
            extra.extend([*built.schedule.radii, *built.profile.outer[1:]])
        grid = shared_grid(config, max(source.window_radius, target.window_radius), extra)

        # ステップ3: 厳密な曲線
        curves = [
            displacement_curve(m, _split_radii(grid, m.domain_radius, m.label, incomplete))
            for m in (forward, inverse)
        ]

        # ステップ4: 数え上げによる下界とボトルネック最適値
        partner = source if built.comparison is None else built.comparison
        for y_net, z_net in ((partner, target), (target, partner)):
            label = f"counting {y_net.label}→{z_net.label}"
            limit = min(y_net.window_radius, z_net.window_radius)
            radii = _split_radii(grid, limit, label, incomplete)
            curves.append(counting_lower_curve(y_net, z_net, radii, label))
        curves.append(self._bottleneck(target, partner, grid, incomplete))

        # ステップ5: 解析的な上界
        curves.extend(self._analytic(built, curves[0], grid, incomplete))
        if built.psi and built.zeta is not None:
            tables["inverse_blowup"] = self._inverse_blowup(built.psi, built.zeta, curves[1])

        # ステップ6: 成果物を書き出す
        out = config.out
        written = [artifacts.write_curves(out / "curves.csv", curves)]
        written.append(
            artifacts.write_rows(
                out / "incomplete.csv",
                ("curve", "R", "reason"),
                [(i.curve, i.radius, i.reason) for i in incomplete],
            )
        )
        for name, (header, rows) in tables.items():
            written.append(artifacts.write_rows(out / f"{name}.csv", header, rows))
        written.append(artifacts.write_map(out / "map.csv", forward))
        logger.info("%d 本の曲線を %s に書き出しました", len(curves), out)
        return DisplacementResult(
            curves=curves, incomplete=incomplete, tables=tables, artifacts=written
        )

    @staticmethod
    def _bottleneck(
        y_net: NetWindow, z_net: NetWindow, grid: list[float], incomplete: list[IncompleteRadius]
    ) -> DisplacementCurve:
        label = f"bottleneck {y_net.label}→{z_net.label}"
        radii = _split_radii(grid, y_net.window_radius, label, incomplete)
        feasible = [r for r in radii if ball_count(y_net, r) <= BOTTLENECK_MAX_POINTS]
        incomplete.extend(
            IncompleteRadius(label, r, f"始点が {BOTTLENECK_MAX_POINTS} 個を超えます")
            for r in radii[len(feasible) :]
        )
        skipped: list[tuple[float, str]] = []
        curve = bottleneck_curve(y_net, z_net, feasible, label=label, skipped=skipped)
        incomplete.extend(IncompleteRadius(label, r, reason) for r, reason in skipped)
        return curve

    @staticmethod
    def _analytic(
        built: BuiltNet,
        forward_curve: DisplacementCurve,
        grid: list[float],
        incomplete: list[IncompleteRadius],
    ) -> list[DisplacementCurve]:
        bounds: list[DisplacementCurve] = []
        if built.phi is not None:
            phi = built.phi
            radii = [r for r in grid if r > phi.domain_min]
            bounds.append(
                DisplacementCurve(
                    radii=tuple(radii),
                    values=tuple(phi(r) for r in radii),
                    kind=CurveKind.ANALYTIC_UPPER_BOUND,
                    label=f"phi={phi.label}",
                )
            )
            if phi.is_sublinear:
                try:
                    bound = inverse_curve_bound(forward_curve, phi, radii=grid, label="C_phi*phi")
                except PreconditionViolatedError as exc:
                    at = exc.witness if isinstance(exc.witness, float) else forward_curve.max_radius
                    incomplete.append(IncompleteRadius("C_phi*phi", at, str(exc)))
                else:
                    bounds.append(bound)
        if built.layout is not None:
            layout = built.layout
            bounds.append(
                DisplacementCurve(
                    radii=tuple(grid),
                    values=tuple(psi_chain_bound(layout, r) for r in grid),
                    kind=CurveKind.ANALYTIC_UPPER_BOUND,
                    label="sqrt(d)*l_n",
                )
            )
        return bounds

    @staticmethod
    def _inverse_blowup(
        psi: tuple[float, ...], zeta: GrowthFunction, inverse_curve: DisplacementCurve
    ) -> tuple[tuple[str, ...], list[tuple]]:
        """ψ(n−1) での逆写像の変位と ψ(n) − ψ(n−1), n·ζ(ψ(n−1)) の表。"""
        rows: list[tuple] = []
        for n in range(2, len(psi) + 1):
            previous, current = psi[n - 2], psi[n - 1]
            if previous > inverse_curve.max_radius + BALL_TOLERANCE:
                break
            disp = inverse_curve.at(previous)
            rows.append((n, previous, disp, current - previous, n * zeta(previous)))
        return ("n", "psi_n_minus_1", "disp_inverse", "psi_gap", "n_zeta"), rows


class DensityUseCase:
    """自然密度の推定値と計数測度の不一致度を計算するUse Case。

    不一致度は一様測度に対する値と、族ごとの弱極限(半空間ネットなら
    H⁺ で c、H⁻ で 2−c)に対する値の両方を出力します。
    """

    def execute(self, config: ExperimentConfig) -> DensityResult:
        """密度の計算を実行します。

        Raises:
            NetLabError: 半径が窓を超える場合など
        """
        built = build_net(config.net)
        net = built.net
        if config.radii is not None:
            grid = list(config.radii)
        else:
            limit = net.window_radius
            grid = sorted(
                {float(r) for r in np.geomspace(max(1.0, limit / 64), limit, config.grid_points)}
            )

        density = natural_density_curve(net, grid)
        discrepancy = [
            (
                radius,
                counting_measure_discrepancy(net, radius),
                counting_measure_discrepancy(net, radius, target=built.limit_measure),
            )
            for radius in grid
        ]

        out = config.out
        written = [
            artifacts.write_rows(out / "density.csv", ("R", "alpha_hat"), density),
            artifacts.write_rows(out / "discrepancy.csv", ("R", "uniform", "limit"), discrepancy),
        ]
        logger.info("密度と不一致度を %s に書き出しました", out)
        return DensityResult(density=density, discrepancy=discrepancy, artifacts=written)


class VerifySuiteUseCase:
    """受け入れ基準のスイートを実行し、基準ごとの JSON レポートを書き出すUse Case。"""

    def execute(self, config: ExperimentConfig) -> SuiteReport:
        """スイートを実行します(失敗しても例外は送出せず、レポートに記録します)。"""
        results: list[CriterionResult] = []
        if config.suite == "faults":
            results.extend(run_faults())
        for criterion_id in config.criterion_ids:
            started = time.perf_counter()
            result = run_criterion(criterion_id, seed=config.seed)
            result = result.timed(time.perf_counter() - started)
            verdict = "PASS" if result.passed else "FAIL"
            logger.info("基準 %d (%s): %s", criterion_id, result.name, verdict)
            results.append(result)
        report = SuiteReport(suite=config.suite, criteria=results)
        path = artifacts.write_json(config.out / "report.json", report.to_dict())
        return SuiteReport(suite=config.suite, criteria=results, artifacts=[path])
