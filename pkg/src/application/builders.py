"""NetSpec からネットと付随する写像を組み立てます。"""

import logging
from dataclasses import dataclass, field

from src.application.dto import NetSpec
from src.domain.counterexamples import halfspace_net, onedim_counterexample
from src.domain.density import HalfSpaceTarget, UniformTarget
from src.domain.growth import GrowthFunction
from src.domain.models import ExplicitMap, NetWindow
from src.domain.net_core import integer_lattice_window, layer_gap
from src.domain.patched_net import CubeLayout, patch_bijection, patched_net
from src.domain.protocols import DensityTarget
from src.domain.radial_rescale import RadialProfile, fit_schedule, radial_rescale
from src.domain.schedule import RadiusSchedule, radius_schedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BuiltNet:
    """組み立てたネットと、比較対象のネット・写像。

    Attributes:
        family: ネットの族
        net: 生成したネット
        reference: 比較対象のネット(radial/onedim では写像の定義域側、
            それ以外では同じ窓の整数格子)
        mapping: 明示的な写像(radial の g と onedim の f は reference → net、
            patched の h は net → reference。なければ None)
        phi: radial の尺度 φ
        schedule: radial の(窓に合わせて切り詰めた)スケジュール
        profile: radial の動径プロファイル
        layout: patched の立方体の配置
        psi: onedim の ψ(1..n_max)
        zeta: onedim の ζ
        limit_measure: net の計数測度の弱極限
        comparison: radial で Z ≠ X のときの比較対象 Z(None なら Z = reference)
    """

    family: str
    net: NetWindow
    reference: NetWindow
    mapping: ExplicitMap | None = None
    phi: GrowthFunction | None = None
    schedule: RadiusSchedule | None = None
    profile: RadialProfile | None = None
    layout: CubeLayout | None = None
    psi: tuple[float, ...] = ()
    zeta: GrowthFunction | None = None
    limit_measure: DensityTarget = field(default_factory=UniformTarget)
    comparison: NetWindow | None = None


def build_radial(
    base: NetWindow,
    phi: GrowthFunction,
    ratio: float,
    count: int,
    *,
    extend_tail: bool = False,
    comparison: NetWindow | None = None,
) -> BuiltNet:
    """X = base を φ のスケジュールで動径再配置します。

    comparison を渡すとそれを Z として R̄ を数え上げで決め、省略時は Z = X です。
    """
    z_net = base if comparison is None else comparison
    gap = max(layer_gap(base), layer_gap(z_net))
    schedule = fit_schedule(base, z_net, phi, radius_schedule(phi, ratio, gap, count))
    rescale = radial_rescale(base, z_net, phi, schedule, extend_tail=extend_tail)
    return BuiltNet(
        family="radial",
        net=rescale.net,
        reference=base,
        mapping=rescale.mapping,
        phi=phi,
        schedule=schedule,
        profile=rescale.profile,
        comparison=comparison,
    )


def build_net(spec: NetSpec) -> BuiltNet:
    """指定された族のネットを組み立てます。

    Raises:
        NetLabError: 構成の前提が成り立たない場合(各ドメイン関数の例外)
    """
    logger.info("ネットを組み立てます: family=%s dim=%d R=%g", spec.family, spec.dim, spec.radius)
    if spec.family == "lattice":
        lattice = integer_lattice_window(spec.dim, spec.radius, scale=spec.scale)
        reference = lattice if spec.scale == 1 else integer_lattice_window(spec.dim, spec.radius)
        return BuiltNet(
            family=spec.family,
            net=lattice,
            reference=reference,
            limit_measure=UniformTarget(density=spec.scale ** (-spec.dim)),
        )

    if spec.family == "radial":
        base = integer_lattice_window(spec.dim, spec.radius)
        comparison = None
        if spec.reference_scale != 1:
            comparison = integer_lattice_window(spec.dim, spec.radius, scale=spec.reference_scale)
        return build_radial(
            base,
            spec.phi.build(),
            spec.ratio,
            spec.schedule_n,
            extend_tail=spec.extend_tail,
            comparison=comparison,
        )

    if spec.family == "patched":
        patched = patched_net(spec.density.build(spec.dim), spec.sides, spec.psi.build())
        lattice = integer_lattice_window(spec.dim, patched.net.window_radius)
        return BuiltNet(
            family=spec.family,
            net=patched.net,
            reference=lattice,
            mapping=patch_bijection(patched),
            layout=patched.layout,
        )

    if spec.family == "halfspace":
        net = halfspace_net(spec.c, spec.dim, spec.radius)
        lattice = integer_lattice_window(spec.dim, spec.radius)
        return BuiltNet(
            family=spec.family,
            net=net,
            reference=lattice,
            limit_measure=HalfSpaceTarget(spec.c),
        )

    example = onedim_counterexample(spec.zeta.build(), spec.n_max)
    return BuiltNet(
        family=spec.family,
        net=example.y_net,
        reference=example.x_net,
        mapping=example.mapping,
        psi=tuple(float(v) for v in example.psi),
        zeta=spec.zeta.build(),
    )
