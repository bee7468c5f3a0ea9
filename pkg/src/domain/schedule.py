"""半径スケジュール R_1 < R_2 < … の生成。

R_1 = φ⁻¹(M)、R_i = φ⁻¹(M·φ(R_{i−1})) の漸化式で半径を作り、
次の3条件を生成後に必ず再検査します:
(i) R_1 > s
(ii) R_i ≥ K·R_{i−1}
(iii) φ(R_{i+1}) ≤ M·φ(R_i)
"""

import logging
from dataclasses import dataclass

from src.domain.constants import SCHEDULE_MAX_EXPONENT, SCHEDULE_TOLERANCE
from src.domain.errors import GrowthRangeError, InvalidParameterError, ScheduleInfeasibleError
from src.domain.growth import GrowthFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadiusSchedule:
    """3条件を満たす半径スケジュール。

    Attributes:
        radii: 狭義単調増加な半径 (R_1, …, R_n)
        multiplier: M(M ≥ K)
        ratio: K(K > 1)
        layer_gap: 層間ギャップ s
        phi: スケジュールを生成した φ

    Raises:
        ScheduleInfeasibleError: いずれかの条件が成り立たない場合
    """

    radii: tuple[float, ...]
    multiplier: float
    ratio: float
    layer_gap: float
    phi: GrowthFunction

    def __post_init__(self) -> None:
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii:
            msg = "スケジュールが空です"
            raise ScheduleInfeasibleError(msg)
        if self.ratio <= 1:
            msg = f"K > 1 である必要がありますが、K={self.ratio}です"
            raise ScheduleInfeasibleError(msg)
        if self.multiplier < self.ratio:
            msg = f"M ≥ K である必要があります: M={self.multiplier}, K={self.ratio}"
            raise ScheduleInfeasibleError(msg)
        if not radii[0] > self.layer_gap:
            msg = f"条件(i) R_1 > s が成り立ちません: R_1={radii[0]}, s={self.layer_gap}"
            raise ScheduleInfeasibleError(msg)
        for i in range(1, len(radii)):
            previous, current = radii[i - 1], radii[i]
            if current < self.ratio * previous * (1 - SCHEDULE_TOLERANCE):
                msg = (
                    f"条件(ii) R_{i + 1} ≥ K·R_{i} が成り立ちません: "
                    f"{current} < {self.ratio}·{previous}"
                )
                raise ScheduleInfeasibleError(msg)
            bound = self.multiplier * self.phi(previous)
            if self.phi(current) > bound * (1 + SCHEDULE_TOLERANCE) + SCHEDULE_TOLERANCE:
                msg = (
                    f"条件(iii) φ(R_{i + 1}) ≤ M·φ(R_{i}) が成り立ちません: "
                    f"{self.phi(current)} > {bound}"
                )
                raise ScheduleInfeasibleError(msg)

    def __len__(self) -> int:
        return len(self.radii)

    def truncated(self, count: int) -> "RadiusSchedule":
        """先頭 count 個の半径に切り詰めたスケジュールを返します。"""
        if not 1 <= count <= len(self.radii):
            msg = f"切り詰める個数は 1..{len(self.radii)} の範囲である必要があります: {count}"
            raise InvalidParameterError(msg)
        return RadiusSchedule(
            radii=self.radii[:count],
            multiplier=self.multiplier,
            ratio=self.ratio,
            layer_gap=self.layer_gap,
            phi=self.phi,
        )

    def rows(self) -> list[tuple[int, float, float]]:
        """(i, R_i, φ(R_i)) の行(i は 1 始まり)。"""
        return [(i, r, self.phi(r)) for i, r in enumerate(self.radii, start=1)]


def _iterate(phi: GrowthFunction, multiplier: float, count: int) -> tuple[float, ...]:
    radii = [phi.inverse(multiplier)]
    for _ in range(count - 1):
        radii.append(phi.inverse(multiplier * phi(radii[-1])))
    return tuple(radii)


def radius_schedule(
    phi: GrowthFunction,
    ratio: float,
    layer_gap: float,
    count: int,
    multiplier: float | None = None,
) -> RadiusSchedule:
    """φ に対する半径スケジュールを生成します。

    M を省略した場合は、M ≥ K、R_1 = φ⁻¹(M) > s、φ(R_1) < R_1 を満たし、
    生成結果が3条件を満たす最小の2のべきを選びます。

    Args:
        phi: 非有界・狭義増加・o(R) と宣言された φ
        ratio: K(> 1)
        layer_gap: 層間ギャップ s
        count: 半径の個数 n
        multiplier: M を明示する場合に指定

    Returns:
        RadiusSchedule

    Raises:
        InvalidParameterError: K ≤ 1 または n < 1 の場合
        ScheduleInfeasibleError: φ が有界・逆関数を持たない、または M が見つからない場合

    Examples:
        >>> radius_schedule(GrowthFunction.sqrt(), ratio=4.0, layer_gap=1.0, count=3).radii
        (16.0, 256.0, 4096.0)
    """
    if ratio <= 1 or count < 1:
        msg = f"K > 1 かつ n ≥ 1 である必要があります: K={ratio}, n={count}"
        raise InvalidParameterError(msg)
    if phi.is_bounded or not phi.is_strictly_increasing or not phi.is_sublinear:
        msg = f"φ '{phi.label}' は非有界・狭義増加・o(R) と宣言されていません"
        raise ScheduleInfeasibleError(msg)

    if multiplier is not None:
        try:
            radii = _iterate(phi, multiplier, count)
        except GrowthRangeError as exc:
            msg = f"M={multiplier} では φ⁻¹ が計算できません: {exc}"
            raise ScheduleInfeasibleError(msg) from exc
        return RadiusSchedule(radii, multiplier, ratio, layer_gap, phi)

    for exponent in range(SCHEDULE_MAX_EXPONENT):
        candidate = float(2**exponent)
        if candidate < ratio:
            continue
        try:
            first = phi.inverse(candidate)
            if not (first > layer_gap and phi(first) < first):
                continue
            radii = _iterate(phi, candidate, count)
            schedule = RadiusSchedule(radii, candidate, ratio, layer_gap, phi)
        except (GrowthRangeError, ScheduleInfeasibleError):
            continue
        logger.debug("M=%g を選びました(φ=%s, K=%g)", candidate, phi.label, ratio)
        return schedule

    msg = f"φ '{phi.label}' に対して条件を満たす M が見つかりません"
    raise ScheduleInfeasibleError(msg)
