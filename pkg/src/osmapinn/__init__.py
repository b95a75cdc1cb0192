"""Open-sphere microphone array analysis assisted by a physics-informed network."""

from .acoustics import FieldSnapshot, Medium, PointSource
from .coeffs import CoeffSet
from .geometry import SphericalGrid, make_grid
from .specfun import ModeIndex

__version__ = "0.1.0"

__all__ = [
    "CoeffSet",
    "FieldSnapshot",
    "Medium",
    "ModeIndex",
    "PointSource",
    "SphericalGrid",
    "make_grid",
]
