"""Clarke calculus for separable piecewise-smooth functions."""

from mvhvi.nonsmooth.growth import estimate_growth
from mvhvi.nonsmooth.piecewise import (
    CoordinateFunction,
    Piece,
    PieceKind,
    PiecewiseC1Spec,
    SubgradientBox,
    clarke_dir,
    eval_J,
    local_lipschitz,
    subgradient_box,
)
from mvhvi.nonsmooth.properties import PropertyReport, check_clarke_calculus

__all__ = [
    "CoordinateFunction",
    "Piece",
    "PieceKind",
    "PiecewiseC1Spec",
    "PropertyReport",
    "SubgradientBox",
    "check_clarke_calculus",
    "clarke_dir",
    "estimate_growth",
    "eval_J",
    "local_lipschitz",
    "subgradient_box",
]
