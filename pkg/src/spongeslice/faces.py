"""Faces of the unit cube and how diagonal contractions move them.

A face is canonicalized by two bitmasks: ``free_mask`` marks the coordinates
spanning the face (the full cube has all bits set), ``offset_mask`` marks the
pinned coordinates sitting at 1 rather than 0.  ``offset_mask`` bits are
always disjoint from ``free_mask`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from spongeslice.core import ONE, ZERO, DiagonalMap, SpecError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Face:
    dimension: int
    free_mask: int
    offset_mask: int

    def __post_init__(self):
        if self.dimension < 1:
            raise SpecError("faces need dimension >= 1")
        full = (1 << self.dimension) - 1
        if self.free_mask & ~full or self.offset_mask & ~full:
            raise SpecError("mask bits outside the cube's coordinates")
        if self.free_mask & self.offset_mask:
            raise SpecError("pinned offset on a free coordinate")

    @classmethod
    def from_parts(
        cls, dimension: int, free: Sequence[int], pinned_at_one: Sequence[int]
    ) -> "Face":
        free_mask = 0
        for i in free:
            free_mask |= 1 << i
        offset_mask = 0
        for i in pinned_at_one:
            offset_mask |= 1 << i
        return cls(dimension, free_mask, offset_mask)

    @classmethod
    def full_cube(cls, dimension: int) -> "Face":
        return cls(dimension, (1 << dimension) - 1, 0)

    @property
    def face_dim(self) -> int:
        return self.free_mask.bit_count()

    @property
    def is_full_cube(self) -> bool:
        return self.free_mask == (1 << self.dimension) - 1

    def free_coordinates(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dimension) if self.free_mask >> i & 1)

    def pinned_coordinates(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dimension) if not self.free_mask >> i & 1)

    def pinned_value(self, i: int) -> Fraction:
        if self.free_mask >> i & 1:
            raise SpecError(f"coordinate {i} is not pinned")
        return ONE if self.offset_mask >> i & 1 else ZERO

    def barycenter(self) -> tuple[Fraction, ...]:
        """A relative-interior point of the face."""
        return tuple(
            HALF if self.free_mask >> i & 1 else self.pinned_value(i)
            for i in range(self.dimension)
        )

    def contains_point(self, point: Sequence[Fraction]) -> bool:
        """Membership in the closed face."""
        for i, x in enumerate(point):
            if self.free_mask >> i & 1:
                if not 0 <= x <= 1:
                    return False
            elif x != self.pinned_value(i):
                return False
        return True

    def __str__(self):
        parts = []
        for i in range(self.dimension):
            if self.free_mask >> i & 1:
                parts.append("[0,1]")
            else:
                parts.append("{%d}" % (1 if self.offset_mask >> i & 1 else 0))
        return "x".join(parts)


def containing_face(point: Sequence[Fraction]) -> Face:
    """The unique face with the point in its relative interior.

    Coordinates strictly inside (0,1) span the face; coordinates at 0 or 1
    pin it.
    """
    d = len(point)
    free_mask = 0
    offset_mask = 0
    for i, x in enumerate(point):
        if not 0 <= x <= 1:
            raise SpecError(f"coordinate {i} = {x} outside the cube")
        if 0 < x < 1:
            free_mask |= 1 << i
        elif x == 1:
            offset_mask |= 1 << i
    return Face(d, free_mask, offset_mask)


def face_meets_translate(face: Face, translate: Sequence[int]) -> bool:
    """Does the face's relative interior meet ``translate + [0,1]^d``?

    Decided by pure digit arithmetic: the translate must vanish on free
    coordinates and sit in {b-1, b} on coordinates pinned at b.
    """
    if len(translate) != face.dimension:
        raise SpecError("translate has the wrong dimension")
    for i, u in enumerate(translate):
        if face.free_mask >> i & 1:
            if u != 0:
                return False
        else:
            b = 1 if face.offset_mask >> i & 1 else 0
            if u not in (b - 1, b):
                return False
    return True


def map_face(g: DiagonalMap, face: Face) -> Face:
    """The containing face of the image of the face's relative interior.

    For a cube-into-cube diagonal contraction the result F' satisfies
    g(F) ⊆ F' and either F' = F or dim F' >= dim F + 1.
    """
    if not g.maps_cube_into_cube():
        raise SpecError("map does not send the cube into itself")
    if g.dimension != face.dimension:
        raise SpecError("map and face dimensions differ")
    return containing_face(g(face.barycenter()))


def all_faces(dimension: int):
    """Every face of [0,1]^d, lexicographic in (free_mask, offset_mask)."""
    full = 1 << dimension
    for free_mask in range(full):
        pinned = ~free_mask & (full - 1)
        sub = pinned
        masks = []
        while True:
            masks.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & pinned
        for offset_mask in sorted(masks):
            yield Face(dimension, free_mask, offset_mask)
