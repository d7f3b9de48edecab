"""Built-in example systems used by tests, fixtures and the CLI docs.

The two 8x5 carpets share row counts (8,1,2,1,8): full bottom and top rows,
a full left column, and one extra "spur" digit in the middle row.  Placing
the spur against the right boundary column keeps every first-level component
attached to the boundary (islands only appear deeper, and the connected part
is graph-directed); placing it in an interior column makes it a first-level
island, so the connected part collapses to the 19-digit bracket carpet.
"""

from __future__ import annotations

from fractions import Fraction

from spongeslice.core import BaseIFS, SpongeSpec

Digit = tuple[int, int]


def _carpet(digits, name: str) -> SpongeSpec:
    bases = (BaseIFS.uniform(8), BaseIFS.uniform(5))
    return SpongeSpec(bases, tuple(digits), name)


def _bracket_digits() -> list[Digit]:
    digits: list[Digit] = [(x, 0) for x in range(8)]
    digits += [(0, 1), (0, 2), (0, 3)]
    digits += [(x, 4) for x in range(8)]
    return digits


def bracket_carpet() -> SpongeSpec:
    """The 19-digit carpet: full top/bottom rows joined by the left column."""
    return _carpet(_bracket_digits(), "bracket")


def boundary_spur_carpet() -> SpongeSpec:
    """Bracket plus a spur at the right boundary column of the middle row."""
    return _carpet(_bracket_digits() + [(7, 2)], "boundary-spur")


def island_spur_carpet() -> SpongeSpec:
    """Bracket plus an interior spur: {(4,2)} is a depth-1 island."""
    return _carpet(_bracket_digits() + [(4, 2)], "island-spur")


def boundary_spur_roles() -> dict[str, tuple[Digit, ...]]:
    """Edge roles of the two-vertex graph-directed system of the spur carpet.

    Keys name (source, target) vertex pairs.  The spur digit carries no edge
    out of the second vertex: the free-standing component never extends into
    the isolated cell, while the first vertex (whose right edge is glued to a
    neighbour) keeps it.
    """
    digits = boundary_spur_carpet().digits
    xy = ((0, 1), (0, 2), (0, 3))
    yy = ((7, 0), (0, 1), (0, 2), (0, 3), (7, 4))
    xx = tuple(d for d in digits if d not in set(xy))
    yx = tuple(d for d in digits if d not in set(yy) and d != (7, 2))
    return {"xx": xx, "xy": xy, "yx": yx, "yy": yy}


def boundary_spur_row_matrices() -> list[list[list[int]]]:
    """Per-row edge-count matrices of the spur carpet's two-vertex system."""
    a04 = [[8, 7], [0, 1]]
    a13 = [[0, 0], [1, 1]]
    a2 = [[1, 0], [1, 1]]
    return [a04, a13, a2, [row[:] for row in a13], [row[:] for row in a04]]


def boundary_spur_adjacency() -> list[list[int]]:
    """Total edge counts, columns indexed by source vertex."""
    return [[17, 14], [3, 5]]


def two_cell_dust() -> SpongeSpec:
    """Two disjoint cells on a 4x4 grid; {(1,1)} is a depth-1 island."""
    bases = (BaseIFS.uniform(4), BaseIFS.uniform(4))
    return SpongeSpec(bases, ((1, 1), (3, 3)), "two-cell-dust")


def three_cell_dust() -> SpongeSpec:
    """Totally disconnected 4x4 spec with attractor points on the right edge."""
    bases = (BaseIFS.uniform(4), BaseIFS.uniform(4))
    return SpongeSpec(bases, ((1, 1), (3, 0), (3, 3)), "three-cell-dust")


def uneven_carpet() -> SpongeSpec:
    """A slicing carpet with unequal x-ratios (1/3 and 2/3)."""
    x = BaseIFS((Fraction(1, 3), Fraction(2, 3)), (Fraction(0), Fraction(1, 3)))
    y = BaseIFS.uniform(2)
    return SpongeSpec((x, y), ((0, 0), (1, 1)), "uneven")


def sponge_3d() -> SpongeSpec:
    """A 3-dimensional grid sponge (two cells sharing one corner)."""
    bases = tuple(BaseIFS.uniform(2) for _ in range(3))
    return SpongeSpec(bases, ((0, 0, 0), (1, 1, 1)), "corner-pair-3d")
