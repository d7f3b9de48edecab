"""Exact-rational modeling of diagonal IFSs on the unit cube.

Every geometric predicate in this module works on `fractions.Fraction`
values; no floating point enters any equality-sensitive decision.  All value
types are immutable and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Digit = tuple[int, ...]
Word = tuple[Digit, ...]
Interval = tuple[Fraction, Fraction]
Box = tuple[Interval, ...]

ZERO = Fraction(0)
ONE = Fraction(1)

UNIT_INTERVAL: Interval = (ZERO, ONE)


class SpecError(ValueError):
    """A sponge description violates its invariants."""


class BudgetError(RuntimeError):
    """An operation would exceed its configured size budget."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise SpecError(f"expected an exact rational, got {value!r}")


@dataclass(frozen=True)
class BaseIFS:
    """A family of contractions ``x -> r_j * x + b_j`` of [0,1].

    The family is *slicing* when the images of [0,1) partition [0,1) from
    left to right: ``b_0 = 0``, ``b_{j+1} = b_j + r_j`` and the last interval
    ends at 1.
    """

    ratios: tuple[Fraction, ...]
    offsets: tuple[Fraction, ...]

    def __post_init__(self):
        ratios = tuple(_as_fraction(r) for r in self.ratios)
        offsets = tuple(_as_fraction(b) for b in self.offsets)
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "offsets", offsets)
        problems = base_diagnostics(ratios, offsets)
        if problems:
            raise SpecError("; ".join(problems))

    @classmethod
    def uniform(cls, n: int) -> "BaseIFS":
        """The equal-ratio base subdividing [0,1] into n slots."""
        r = Fraction(1, n)
        return cls(tuple(r for _ in range(n)), tuple(r * j for j in range(n)))

    @property
    def count(self) -> int:
        return len(self.ratios)

    @property
    def is_slicing(self) -> bool:
        if self.offsets[0] != 0:
            return False
        for j in range(self.count - 1):
            if self.offsets[j] + self.ratios[j] != self.offsets[j + 1]:
                return False
        return self.offsets[-1] + self.ratios[-1] == 1

    @property
    def is_uniform(self) -> bool:
        """True when all ratios are equal (grid subdivision)."""
        return len(set(self.ratios)) == 1

    def map_point(self, j: int, x: Fraction) -> Fraction:
        return self.ratios[j] * x + self.offsets[j]

    def map_interval(self, j: int, iv: Interval) -> Interval:
        return (self.map_point(j, iv[0]), self.map_point(j, iv[1]))

    def fixes_zero(self, j: int) -> bool:
        return self.offsets[j] == 0

    def fixes_one(self, j: int) -> bool:
        return self.offsets[j] + self.ratios[j] == 1


def base_diagnostics(ratios: Sequence, offsets: Sequence) -> list[str]:
    """Range problems of one base family, as human-readable strings."""
    problems = []
    try:
        ratios = [_as_fraction(r) for r in ratios]
        offsets = [_as_fraction(b) for b in offsets]
    except (SpecError, ValueError, ZeroDivisionError) as exc:
        return [str(exc)]
    if len(ratios) != len(offsets):
        problems.append(
            f"{len(ratios)} ratios but {len(offsets)} offsets"
        )
        return problems
    if len(ratios) < 2:
        problems.append(f"need at least 2 maps, got {len(ratios)}")
    for j, r in enumerate(ratios):
        if not 0 < r < 1:
            problems.append(f"ratio {j} = {r} outside (0,1)")
    for j, b in enumerate(offsets):
        if not 0 <= b < 1:
            problems.append(f"offset {j} = {b} outside [0,1)")
    return problems


def slicing_diagnostics(base: BaseIFS) -> list[str]:
    """Why the base fails to partition [0,1) left to right (empty if it does)."""
    problems = []
    if base.offsets[0] != 0:
        problems.append(f"first offset is {base.offsets[0]}, not 0")
    for j in range(base.count - 1):
        end = base.offsets[j] + base.ratios[j]
        nxt = base.offsets[j + 1]
        if end < nxt:
            problems.append(f"gap between maps {j} and {j + 1} ({end} < {nxt})")
        elif end > nxt:
            problems.append(f"overlap between maps {j} and {j + 1} ({end} > {nxt})")
    total = base.offsets[-1] + base.ratios[-1]
    if total != 1:
        problems.append(f"intervals end at {total}, not 1")
    return problems


@dataclass(frozen=True)
class DiagonalMap:
    """A coordinatewise affine map ``x_i -> a_i * x_i + t_i``."""

    scales: tuple[Fraction, ...]
    shifts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(_as_fraction(a) for a in self.scales))
        object.__setattr__(self, "shifts", tuple(_as_fraction(t) for t in self.shifts))
        if len(self.scales) != len(self.shifts):
            raise SpecError("scales and shifts must have the same length")

    @property
    def dimension(self) -> int:
        return len(self.scales)

    def __call__(self, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(a * x + t for a, x, t in zip(self.scales, point, self.shifts))

    def image_box(self, box: Box) -> Box:
        return tuple(
            (a * lo + t, a * hi + t)
            for a, t, (lo, hi) in zip(self.scales, self.shifts, box)
        )

    def after(self, other: "DiagonalMap") -> "DiagonalMap":
        """The composition self ∘ other."""
        scales = tuple(a * b for a, b in zip(self.scales, other.scales))
        shifts = tuple(
            a * t2 + t1 for a, t1, t2 in zip(self.scales, self.shifts, other.shifts)
        )
        return DiagonalMap(scales, shifts)

    def maps_cube_into_cube(self) -> bool:
        return all(
            0 < a and t >= 0 and a + t <= 1
            for a, t in zip(self.scales, self.shifts)
        )

    def is_contracting(self) -> bool:
        return all(0 < a < 1 for a in self.scales)


def unit_box(dimension: int) -> Box:
    return tuple(UNIT_INTERVAL for _ in range(dimension))


@dataclass(frozen=True)
class SpongeSpec:
    """A diagonal IFS: one base family per coordinate plus a digit set.

    Digits are stored sorted lexicographically; every iteration over them is
    deterministic.
    """

    bases: tuple[BaseIFS, ...]
    digits: tuple[Digit, ...]
    name: str = ""

    def __post_init__(self):
        bases = tuple(self.bases)
        digits = tuple(sorted({tuple(d) for d in self.digits}))
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "digits", digits)
        if not bases:
            raise SpecError("at least one coordinate required")
        if not digits:
            raise SpecError("empty digit set")
        d = len(bases)
        for digit in digits:
            if len(digit) != d:
                raise SpecError(f"digit {digit} has {len(digit)} coordinates, expected {d}")
            for i, a in enumerate(digit):
                if not isinstance(a, int) or not 0 <= a < bases[i].count:
                    raise SpecError(
                        f"digit {digit}: coordinate {i} value {a} outside 0..{bases[i].count - 1}"
                    )

    @property
    def dimension(self) -> int:
        return len(self.bases)

    @property
    def branch_counts(self) -> tuple[int, ...]:
        return tuple(base.count for base in self.bases)

    @property
    def is_slicing(self) -> bool:
        return all(base.is_slicing for base in self.bases)

    @property
    def is_grid(self) -> bool:
        """True for equal-ratio slicing specs (uniform grid subdivision)."""
        return self.is_slicing and all(base.is_uniform for base in self.bases)

    @property
    def degenerate_coordinates(self) -> tuple[int, ...]:
        """Coordinates pinning the attractor to a cube face.

        Coordinate i qualifies when every digit shares one value a there and
        the a-th base map fixes 0 or fixes 1.
        """
        out = []
        for i, base in enumerate(self.bases):
            values = {digit[i] for digit in self.digits}
            if len(values) == 1:
                a = next(iter(values))
                if base.fixes_zero(a) or base.fixes_one(a):
                    out.append(i)
        return tuple(out)

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degenerate_coordinates)

    def digit_map(self, digit: Digit) -> DiagonalMap:
        if digit not in self.digit_set:
            raise SpecError(f"digit {digit} not in the digit set")
        scales = tuple(base.ratios[a] for base, a in zip(self.bases, digit))
        shifts = tuple(base.offsets[a] for base, a in zip(self.bases, digit))
        return DiagonalMap(scales, shifts)

    def word_map(self, word: Word) -> DiagonalMap:
        """The composition of digit maps, leftmost symbol outermost."""
        out = DiagonalMap(
            tuple(ONE for _ in self.bases), tuple(ZERO for _ in self.bases)
        )
        for digit in word:
            out = out.after(self.digit_map(digit))
        return out

    @cached_property
    def digit_set(self) -> frozenset[Digit]:
        return frozenset(self.digits)

    def associated_grid_spec(self) -> "SpongeSpec":
        """The equal-ratio spec with the same branch counts and digits."""
        bases = tuple(BaseIFS.uniform(base.count) for base in self.bases)
        name = f"{self.name}-grid" if self.name else ""
        return SpongeSpec(bases, self.digits, name)

    def reduce_degenerate(self) -> tuple["SpongeSpec", tuple[int, ...]]:
        """Project away degenerate coordinates.

        Returns the lower-dimensional spec together with the indices of the
        kept coordinates.  Raises if nothing (or everything) would remain.
        """
        drop = set(self.degenerate_coordinates)
        if not drop:
            return self, tuple(range(self.dimension))
        keep = tuple(i for i in range(self.dimension) if i not in drop)
        if not keep:
            raise SpecError("all coordinates degenerate: the sponge is a point")
        bases = tuple(self.bases[i] for i in keep)
        digits = tuple(tuple(d[i] for i in keep) for d in self.digits)
        name = f"{self.name}-reduced" if self.name else ""
        return SpongeSpec(bases, digits, name), keep

    def word_ranks(self, word: Word) -> tuple[int, ...]:
        """Per-coordinate position of the word's cell in the depth-k grid.

        At depth k the base-i intervals partition [0,1] in lexicographic
        order, so two cells of a slicing spec touch exactly when all their
        ranks differ by at most 1.
        """
        ranks = [0] * self.dimension
        for digit in word:
            for i, a in enumerate(digit):
                ranks[i] = ranks[i] * self.bases[i].count + a
        return tuple(ranks)


@dataclass(frozen=True)
class Cell:
    """A finite word together with its exact image box of the unit cube."""

    word: Word
    box: Box

    @property
    def depth(self) -> int:
        return len(self.word)

    def corner(self) -> tuple[Fraction, ...]:
        return tuple(lo for lo, _ in self.box)

    def side_lengths(self) -> tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in self.box)


def cell_box(spec: SpongeSpec, word: Iterable[Digit]) -> Cell:
    """The cell of a word, composed left to right (leftmost symbol outermost)."""
    word = tuple(tuple(d) for d in word)
    digit_set = spec.digit_set
    los = [ZERO] * spec.dimension
    scales = [ONE] * spec.dimension
    for digit in word:
        if digit not in digit_set:
            raise SpecError(f"digit {digit} not in the digit set")
        for i, a in enumerate(digit):
            base = spec.bases[i]
            los[i] += scales[i] * base.offsets[a]
            scales[i] *= base.ratios[a]
    box = tuple((lo, lo + sc) for lo, sc in zip(los, scales))
    return Cell(word, box)


def boxes_intersect(a: Box, b: Box) -> bool:
    """Closed boxes intersect (touching at faces or corners counts)."""
    return all(alo <= bhi and blo <= ahi for (alo, ahi), (blo, bhi) in zip(a, b))


def box_contains(outer: Box, inner: Box) -> bool:
    return all(olo <= ilo and ihi <= ohi for (olo, ohi), (ilo, ihi) in zip(outer, inner))


def point_in_box(point: Sequence[Fraction], box: Box) -> bool:
    return all(lo <= x <= hi for x, (lo, hi) in zip(point, box))


def validate_spec(
    bases: Sequence,
    digits: Sequence,
    name: str = "",
    require_slicing: bool = False,
) -> SpongeSpec:
    """Build a validated spec, raising SpecError with every diagnostic found.

    Accepts either BaseIFS values or raw (ratios, offsets) pairs so callers
    holding parsed file data can validate in one step.
    """
    problems: list[str] = []
    built: list[BaseIFS] = []
    for i, base in enumerate(bases):
        if isinstance(base, BaseIFS):
            built.append(base)
            continue
        ratios, offsets = base
        local = base_diagnostics(ratios, offsets)
        if local:
            problems.extend(f"coordinate {i}: {p}" for p in local)
        else:
            built.append(BaseIFS(tuple(ratios), tuple(offsets)))
    if problems:
        raise SpecError("; ".join(problems))
    try:
        spec = SpongeSpec(tuple(built), tuple(tuple(d) for d in digits), name)
    except SpecError:
        raise
    if require_slicing and not spec.is_slicing:
        for i, base in enumerate(spec.bases):
            problems.extend(f"coordinate {i}: {p}" for p in slicing_diagnostics(base))
        raise SpecError("slicing claimed but " + "; ".join(problems))
    return spec
