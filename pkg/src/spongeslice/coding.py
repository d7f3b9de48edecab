"""Symbolic codings and the conjugacy onto the associated grid sponge.

Infinite codings are represented as an eventually-periodic prefix+cycle pair;
aperiodic points are handled through finite prefixes with exact interval
enclosures, so every computation here stays finite and rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import nextafter
from typing import Sequence

import mpmath

from spongeslice.core import (
    ONE,
    ZERO,
    BaseIFS,
    Box,
    Digit,
    SpecError,
    SpongeSpec,
    Word,
    cell_box,
    point_in_box,
)

CERTIFICATE_PRECISION = 120  # working bits for the exponent logarithms


@dataclass(frozen=True)
class Coding:
    """A finite word, optionally followed by an infinite repeating cycle."""

    prefix: tuple
    cycle: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))

    @classmethod
    def constant(cls, symbol) -> "Coding":
        return cls((), (symbol,))

    @classmethod
    def finite(cls, symbols) -> "Coding":
        return cls(tuple(symbols), ())

    @property
    def is_periodic(self) -> bool:
        return bool(self.cycle)

    def symbols(self, depth: int) -> tuple:
        if depth <= len(self.prefix):
            return self.prefix[:depth]
        if not self.cycle:
            raise SpecError(
                f"finite coding of length {len(self.prefix)} cannot reach depth {depth}"
            )
        out = list(self.prefix)
        i = 0
        while len(out) < depth:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return tuple(out)

    def coordinate(self, i: int) -> "Coding":
        """Project a tuple-symbol coding to one coordinate."""
        return Coding(
            tuple(s[i] for s in self.prefix), tuple(s[i] for s in self.cycle)
        )

    def shifted(self, by: int) -> "Coding":
        """Drop the first `by` symbols."""
        if by <= len(self.prefix):
            return Coding(self.prefix[by:], self.cycle)
        if not self.cycle:
            raise SpecError("cannot shift past the end of a finite coding")
        extra = (by - len(self.prefix)) % len(self.cycle)
        cycle = self.cycle[extra:] + self.cycle[:extra]
        return Coding((), cycle)

    def prepend(self, word) -> "Coding":
        return Coding(tuple(word) + self.prefix, self.cycle)


def _check_symbols(symbols, n: int):
    for s in symbols:
        if not isinstance(s, int) or not 0 <= s < n:
            raise SpecError(f"symbol {s!r} outside 0..{n - 1}")


def grid_series(coding: Coding, n: int, depth: int) -> tuple[Fraction, Fraction]:
    """Truncated value of ``sum h_k / n^k`` plus its exact tail bound ``n^-k``."""
    symbols = coding.symbols(depth) if coding.is_periodic else coding.prefix[:depth]
    _check_symbols(symbols, n)
    value = ZERO
    scale = ONE
    for h in symbols:
        scale /= n
        value += h * scale
    return value, scale


def grid_point(coding: Coding, n: int) -> Fraction:
    """Exact value of an eventually-periodic base-n expansion."""
    if not coding.is_periodic:
        raise SpecError("exact evaluation needs a repeating cycle")
    _check_symbols(coding.prefix + coding.cycle, n)
    head, scale = grid_series(coding, n, len(coding.prefix))
    cycle_value = ZERO
    s = ONE
    for h in coding.cycle:
        s /= n
        cycle_value += h * s
    return head + scale * cycle_value / (1 - s)


def base_series(base: BaseIFS, coding: Coding, depth: int) -> tuple[Fraction, Fraction]:
    """Truncated value of ``sum r_{h_1}..r_{h_{k-1}} b_{h_k}`` plus a tail bound.

    The first term of the series is the bare offset of the first symbol.  The
    bound multiplies the running ratio product by the supremum of the series,
    which is 1 for slicing bases.
    """
    symbols = coding.symbols(depth) if coding.is_periodic else coding.prefix[:depth]
    _check_symbols(symbols, base.count)
    value = ZERO
    scale = ONE
    for h in symbols:
        value += scale * base.offsets[h]
        scale *= base.ratios[h]
    if base.is_slicing:
        sup = ONE
    else:
        r_max = max(base.ratios)
        sup = max(base.offsets) / (1 - r_max)
        sup = max(sup, ONE)
    return value, scale * sup


def base_point(base: BaseIFS, coding: Coding) -> Fraction:
    """Exact coded point of an eventually-periodic coding under the base."""
    if not coding.is_periodic:
        raise SpecError("exact evaluation needs a repeating cycle")
    _check_symbols(coding.prefix + coding.cycle, base.count)
    head, _ = base_series(base, coding, len(coding.prefix))
    scale = ONE
    for h in coding.prefix:
        scale *= base.ratios[h]
    cycle_value = ZERO
    s = ONE
    for h in coding.cycle:
        cycle_value += s * base.offsets[h]
        s *= base.ratios[h]
    return head + scale * cycle_value / (1 - s)


@dataclass(frozen=True)
class HolderCertificate:
    """Two-sided Hölder exponent linking a slicing base to the uniform grid.

    With ``a = alpha`` the sampled inequalities
    ``|f-f'| <= 2 |g-g'|^a`` and ``(1/2) |g-g'|^(1/a) <= |f-f'|`` hold for the
    grid expansion f and the base expansion g of any two codings.
    """

    alpha: float
    r_max: Fraction
    r_min: Fraction
    branch_count: int


def raw_alpha(r_max: Fraction, r_min: Fraction, n: int) -> float:
    """min(log(1/r_max)/log n, log n / log(1/r_min)), rounded down for safety."""
    if r_max == r_min == Fraction(1, n):
        return 1.0
    with mpmath.workprec(CERTIFICATE_PRECISION):
        log_n = mpmath.log(n)
        a1 = -mpmath.log(mpmath.mpf(r_max.numerator) / r_max.denominator) / log_n
        a2 = -log_n / mpmath.log(mpmath.mpf(r_min.numerator) / r_min.denominator)
        value = float(min(a1, a2))
    return nextafter(value, 0.0)


def holder_certificate(base: BaseIFS) -> HolderCertificate:
    if not base.is_slicing:
        raise SpecError("Hölder certificate requires a slicing base")
    r_max, r_min = max(base.ratios), min(base.ratios)
    return HolderCertificate(
        raw_alpha(r_max, r_min, base.count), r_max, r_min, base.count
    )


def point_codings(spec: SpongeSpec, point: Sequence[Fraction], depth: int) -> tuple[Word, ...]:
    """All depth-k words whose cells contain the point, lexicographic.

    Boundary points pick up one extra coding per coordinate ambiguity.
    Raises when the point is not covered at this depth.
    """
    point = tuple(Fraction(x) for x in point)
    if not all(0 <= x <= 1 for x in point):
        raise SpecError("point outside the cube")

    out: list[Word] = []

    def recurse(pt, prefix):
        if len(prefix) == depth:
            out.append(tuple(prefix))
            return
        for digit in spec.digits:
            g = spec.digit_map(digit)
            box = g.image_box(tuple((ZERO, ONE) for _ in pt))
            if point_in_box(pt, box):
                pre = tuple(
                    (x - t) / a for x, a, t in zip(pt, g.scales, g.shifts)
                )
                recurse(pre, prefix + [digit])

    recurse(point, [])
    if not out:
        raise SpecError(f"point {point} not covered at depth {depth}")
    return tuple(sorted(out))


def sponge_point(spec: SpongeSpec, coding: Coding) -> tuple[Fraction, ...]:
    """Exact attractor point of an eventually-periodic coding."""
    return tuple(
        base_point(spec.bases[i], coding.coordinate(i))
        for i in range(spec.dimension)
    )


def grid_image(spec: SpongeSpec, codings: Sequence[Coding], depth: int) -> Box:
    """Enclosure of the image of a sponge point in the associated grid sponge.

    The conjugacy is coding-preserving, so the image is evaluated
    coordinatewise by the grid expansion of any coding of the point.  When
    several codings are supplied (boundary points), all their enclosures are
    intersected; a failure to overlap means the codings do not describe one
    point and is reported instead of silently picking one.
    """
    if not spec.is_slicing:
        raise SpecError("the grid conjugacy is defined for slicing specs")
    if not codings:
        raise SpecError("at least one coding required")
    digit_set = spec.digit_set
    boxes = []
    for coding in codings:
        for s in coding.prefix + coding.cycle:
            if tuple(s) not in digit_set:
                raise SpecError(f"coding symbol {s} not in the digit set")
        intervals = []
        for i in range(spec.dimension):
            coord = coding.coordinate(i)
            n = spec.bases[i].count
            if coord.is_periodic:
                value = grid_point(coord, n)
                intervals.append((value, value))
            else:
                value, err = grid_series(coord, n, depth)
                intervals.append((value, value + err))
        boxes.append(tuple(intervals))
    merged = []
    for i in range(spec.dimension):
        lo = max(box[i][0] for box in boxes)
        hi = min(box[i][1] for box in boxes)
        if lo > hi:
            raise SpecError(
                f"codings disagree in coordinate {i}: enclosures do not overlap"
            )
        merged.append((lo, hi))
    return tuple(merged)


def coding_cell(spec: SpongeSpec, coding: Coding, depth: int):
    """The depth-k cell of the coding in the original spec."""
    return cell_box(spec, coding.symbols(depth))
