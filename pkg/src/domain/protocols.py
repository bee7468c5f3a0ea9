"""ドメイン層のプロトコル定義。

このモジュールは、不一致度(discrepancy)の計算で使用する目標測度の
抽象インターフェース(Protocol)を定義します。
"""

from typing import Protocol

from src.domain.models import Box


class DensityTarget(Protocol):
    """単位球内の箱に対する目標測度のプロトコル。

    一様密度(ルベーグ測度)、格子上の区分定数密度、半空間で密度の異なる
    弱極限などが、このProtocolを実装します。

    このProtocolにより、counting_measure_discrepancy は具体的な密度実装に
    依存せず、箱の測度だけに依存することができます。
    """

    def integrate_box(self, box: Box) -> float:
        """箱 S 上の積分 ∫_S ρ d𝓛 を返します。

        Args:
            box: 単位球内の軸平行な箱

        Returns:
            箱の目標測度
        """
        ...
