"""Domain layer for separated nets and displacement bounds."""

from .errors import NetLabError
from .models import CurveKind, DisplacementCurve, ExplicitMap, NetCertificate, NetWindow
from .protocols import DensityTarget

__all__ = [
    "CurveKind",
    "DensityTarget",
    "DisplacementCurve",
    "ExplicitMap",
    "NetCertificate",
    "NetLabError",
    "NetWindow",
]
