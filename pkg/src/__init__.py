"""Separated Net Lab - 分離ネットの構成と変位の検証モジュール"""

from .application.dto import ExperimentConfig
from .application.use_cases import DisplacementUseCase, GenerateNetUseCase

__all__ = ["DisplacementUseCase", "ExperimentConfig", "GenerateNetUseCase"]
