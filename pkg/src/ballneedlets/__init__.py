"""Weighted needlet frames on the unit ball."""

from .cutoffs import CutoffPair, make_pair
from .geometry import WeightedBall, ball_distance
from .grids import NeedletGrid, build_grid
from .needlets import CoefficientSet, FrameMismatchError, NeedletFrame, NeedletTransform, analyze, synthesize

__all__ = [
    "CoefficientSet",
    "CutoffPair",
    "FrameMismatchError",
    "NeedletFrame",
    "NeedletGrid",
    "NeedletTransform",
    "WeightedBall",
    "analyze",
    "ball_distance",
    "build_grid",
    "make_pair",
    "synthesize",
]

__version__ = "0.1.0"
