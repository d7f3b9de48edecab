"""Exact-rational toolkit for slicing self-affine sponges.

The package models diagonal iterated function systems on the unit cube with
exact rational arithmetic, analyses the connectivity of their finite
approximations (components, islands, interior trivial points, sub-IFS covers),
computes Hausdorff/box dimensions and connectedness indices of grid carpets
and their graph-directed companions, and verifies the connectivity structure
of a planar self-similar system whose isolated points sit on a boundary
segment.
"""

from spongeslice.core import (
    BaseIFS,
    BudgetError,
    Cell,
    DiagonalMap,
    SpecError,
    SpongeSpec,
    cell_box,
    validate_spec,
)
from spongeslice.faces import Face, containing_face, face_meets_translate, map_face

__all__ = [
    "BaseIFS",
    "BudgetError",
    "Cell",
    "DiagonalMap",
    "Face",
    "SpecError",
    "SpongeSpec",
    "cell_box",
    "containing_face",
    "face_meets_translate",
    "map_face",
    "validate_spec",
]
