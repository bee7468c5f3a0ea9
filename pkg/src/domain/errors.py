"""ドメイン層の例外階層。

すべての例外は ValueError を継承するため、入力検証エラーとして
一括で扱うこともできます。
"""


class NetLabError(ValueError):
    """ドメイン例外の基底クラス。"""


class InvalidParameterError(NetLabError):
    """パラメータが許容範囲外。"""


class DegenerateInputError(NetLabError):
    """点数が足りないなど、計算が定義されない入力。"""


class IncompleteWindowError(NetLabError):
    """要求された半径が窓の完全性半径を超えている。"""


class GrowthDomainError(NetLabError):
    """増大関数を定義域外(R ≤ domain_min)で評価しようとした。"""


class GrowthRangeError(NetLabError):
    """逆関数の値が増大関数の値域に入っていない。"""


class ScheduleInfeasibleError(NetLabError):
    """半径スケジュールの条件を満たす倍率 M が存在しない。"""


class IncompleteMapError(NetLabError):
    """要求された球の中に像が定義されていない点がある。"""


class PreconditionViolatedError(NetLabError):
    """前提条件の違反。

    Attributes:
        witness: 違反を示す値(半径・三つ組・違反の一覧など)。なければ None
    """

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


class InfeasibleUnderCapError(NetLabError):
    """候補半径の範囲では完全マッチングが存在しない。

    Attributes:
        max_cardinality: 達成できた最大マッチングのサイズ
    """

    def __init__(self, message: str, max_cardinality: int) -> None:
        super().__init__(message)
        self.max_cardinality = max_cardinality
