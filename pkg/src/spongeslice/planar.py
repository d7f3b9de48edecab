"""Connectivity verification for a planar self-similar system with a pinned
boundary segment.

The built-in seven-map system contracts a trapezoid whose boundary curve
lies inside the attractor united with the segment, so finite unions of
hull-boundary images witness connectivity exactly.  All geometry is exact:
pieces are scaled to a common integer grid and segment intersections are
decided by orientation tests (touching at a point counts, matching
connectivity of closed sets).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from spongeslice.core import BudgetError, SpecError
from spongeslice.topology import UnionFind

Point = tuple[Fraction, Fraction]
IntPoint = tuple[int, int]
Word = tuple[int, ...]

DEFAULT_PIECE_BUDGET = 40_000


@dataclass(frozen=True)
class PlanarMap:
    """A rotation-free similarity ``z -> ratio * z + shift``."""

    ratio: Fraction
    shift: Point

    def __post_init__(self):
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        object.__setattr__(
            self, "shift", (Fraction(self.shift[0]), Fraction(self.shift[1]))
        )
        if not 0 < self.ratio < 1:
            raise SpecError(f"ratio {self.ratio} outside (0,1)")

    def __call__(self, point: Point) -> Point:
        return (
            self.ratio * point[0] + self.shift[0],
            self.ratio * point[1] + self.shift[1],
        )

    def after(self, other: "PlanarMap") -> "PlanarMap":
        return PlanarMap(self.ratio * other.ratio, self(other.shift))


@dataclass(frozen=True)
class PlanarSimilarIFS:
    """Planar similar IFS with a distinguished boundary segment.

    ``hull`` is the closed boundary polygon of the attractor's convex hull
    (its right edge is the pinned segment).  Map indices are split into an
    anchor class (pieces forming the component of the origin), a bridge
    class (pieces funneling into the anchor), and an isolated class.
    ``bridge_witness`` names, per bridge map, the anchor map whose piece the
    proof's induction touches.
    """

    maps: tuple[PlanarMap, ...]
    hull: tuple[Point, ...]
    segment: tuple[Point, Point]
    anchor_class: tuple[int, ...]
    bridge_class: tuple[int, ...]
    isolated_class: tuple[int, ...]
    bridge_witness: dict[int, int]
    name: str = ""

    def __post_init__(self):
        classes = (
            set(self.anchor_class) | set(self.bridge_class) | set(self.isolated_class)
        )
        if classes != set(range(len(self.maps))):
            raise SpecError("classes must partition the map indices")
        for b in self.bridge_class:
            if b not in self.bridge_witness:
                raise SpecError(f"bridge map {b} lacks a witness anchor")

    def word_map(self, word: Word) -> PlanarMap:
        composed = None
        for index in word:
            m = self.maps[index]
            composed = m if composed is None else composed.after(m)
        if composed is None:
            raise SpecError("empty word has no contraction")
        return composed

    def piece(self, word: Word) -> tuple[Point, ...]:
        if not word:
            return self.hull
        m = self.word_map(word)
        return tuple(m(p) for p in self.hull)

    def pieces(self, depth: int, budget: int = DEFAULT_PIECE_BUDGET):
        count = len(self.maps) ** depth
        if count > budget:
            raise BudgetError(f"{count} pieces exceed the budget of {budget}")
        words = itertools.product(range(len(self.maps)), repeat=depth)
        return [(word, self.piece(word)) for word in words]

    @property
    def origin_index(self) -> int:
        for i in self.anchor_class:
            if self.maps[i].shift == (0, 0):
                return i
        raise SpecError("no anchor map fixes the origin")


def trapezoid_ifs() -> PlanarSimilarIFS:
    """The built-in seven-map system pinned to the right edge of its hull."""
    F = Fraction
    maps = (
        PlanarMap(F(2, 3), (F(0), F(0))),
        PlanarMap(F(1, 3), (F(0), F(2, 3))),
        PlanarMap(F(1, 3), (F(1, 3), F(2, 3))),
        PlanarMap(F(1, 6), (F(2, 3), F(5, 6))),
        PlanarMap(F(1, 6), (F(5, 6), F(5, 6))),
        PlanarMap(F(1, 3), (F(2, 3), F(1, 3))),
        PlanarMap(F(1, 12), (F(11, 12), F(17, 24))),
    )
    hull = ((F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(1, 2)))
    segment = ((F(1), F(1, 2)), (F(1), F(1)))
    return PlanarSimilarIFS(
        maps,
        hull,
        segment,
        anchor_class=(0, 1, 2, 3),
        bridge_class=(4, 5),
        isolated_class=(6,),
        bridge_witness={4: 3, 5: 0},
        name="trapezoid",
    )


def perturbed_trapezoid_ifs() -> PlanarSimilarIFS:
    """Negative control: the isolated map pulled off the pinned segment."""
    base = trapezoid_ifs()
    maps = list(base.maps)
    maps[6] = PlanarMap(Fraction(1, 12), (Fraction(7, 8), Fraction(17, 24)))
    return PlanarSimilarIFS(
        tuple(maps),
        base.hull,
        base.segment,
        base.anchor_class,
        base.bridge_class,
        base.isolated_class,
        base.bridge_witness,
        name="trapezoid-perturbed",
    )


def _orientation(a: IntPoint, b: IntPoint, c: IntPoint) -> int:
    value = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (value > 0) - (value < 0)


def _bbox_overlap(a_lo, a_hi, b_lo, b_hi) -> bool:
    return a_lo[0] <= b_hi[0] and b_lo[0] <= a_hi[0] and a_lo[1] <= b_hi[1] and b_lo[1] <= a_hi[1]


def segments_intersect(p1, p2, p3, p4) -> bool:
    """Closed segments share a point (endpoint touch and collinear overlap count)."""
    lo1 = (min(p1[0], p2[0]), min(p1[1], p2[1]))
    hi1 = (max(p1[0], p2[0]), max(p1[1], p2[1]))
    lo2 = (min(p3[0], p4[0]), min(p3[1], p4[1]))
    hi2 = (max(p3[0], p4[0]), max(p3[1], p4[1]))
    if not _bbox_overlap(lo1, hi1, lo2, hi2):
        return False
    o1 = _orientation(p1, p2, p3)
    o2 = _orientation(p1, p2, p4)
    o3 = _orientation(p3, p4, p1)
    o4 = _orientation(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    # collinear cases reduce to the bounding-box overlap already verified
    for o, a, b, p in ((o1, p1, p2, p3), (o2, p1, p2, p4), (o3, p3, p4, p1), (o4, p3, p4, p2)):
        if o == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(
            a[1], b[1]
        ) <= p[1] <= max(a[1], b[1]):
            return True
    return False


class _Node:
    __slots__ = ("points", "closed", "lo", "hi")

    def __init__(self, points: Sequence[IntPoint], closed: bool):
        self.points = tuple(points)
        self.closed = closed
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        self.lo = (min(xs), min(ys))
        self.hi = (max(xs), max(ys))

    def edges(self):
        pts = self.points
        count = len(pts) if self.closed else len(pts) - 1
        for i in range(count):
            yield pts[i], pts[(i + 1) % len(pts)]


def nodes_touch(a: _Node, b: _Node) -> bool:
    if not _bbox_overlap(a.lo, a.hi, b.lo, b.hi):
        return False
    for e1 in a.edges():
        for e2 in b.edges():
            if segments_intersect(e1[0], e1[1], e2[0], e2[1]):
                return True
    return False


def _scale_to_integers(polys: Sequence[Sequence[Point]]) -> list[list[IntPoint]]:
    denom = 1
    for poly in polys:
        for x, y in poly:
            denom = math.lcm(denom, x.denominator, y.denominator)
    return [
        [(int(x * denom), int(y * denom)) for x, y in poly] for poly in polys
    ]


def _candidate_pairs(nodes: Sequence[_Node], buckets_per_axis: int = 64):
    lo_x = min(n.lo[0] for n in nodes)
    lo_y = min(n.lo[1] for n in nodes)
    hi_x = max(n.hi[0] for n in nodes)
    hi_y = max(n.hi[1] for n in nodes)
    width = max(hi_x - lo_x, hi_y - lo_y, 1)
    cell = width // buckets_per_axis + 1
    buckets: dict[tuple[int, int], list[int]] = {}
    for index, node in enumerate(nodes):
        x0 = (node.lo[0] - lo_x) // cell
        x1 = (node.hi[0] - lo_x) // cell
        y0 = (node.lo[1] - lo_y) // cell
        y1 = (node.hi[1] - lo_y) // cell
        for bx in range(x0, x1 + 1):
            for by in range(y0, y1 + 1):
                buckets.setdefault((bx, by), []).append(index)
    pairs = set()
    for members in buckets.values():
        for i, j in itertools.combinations(members, 2):
            pairs.add((i, j) if i < j else (j, i))
    return sorted(pairs)


@dataclass(frozen=True)
class PieceGraph:
    words: tuple[Word, ...]
    adjacency: tuple[tuple[int, int], ...]
    component_roots: tuple[int, ...]
    segment_index: int | None  # index of the segment node, when included

    @property
    def component_count(self) -> int:
        return len(set(self.component_roots))

    def component_members(self, index: int) -> tuple[int, ...]:
        root = self.component_roots[index]
        return tuple(
            i for i, r in enumerate(self.component_roots) if r == root
        )


def piece_graph(
    ifs: PlanarSimilarIFS,
    depth: int,
    include_segment: bool,
    budget: int = DEFAULT_PIECE_BUDGET,
) -> PieceGraph:
    """Exact intersection graph of the depth-k hull pieces.

    With ``include_segment`` the pinned segment joins the graph as an extra
    node (it is part of the augmented attractor).
    """
    pieces = ifs.pieces(depth, budget)
    polys: list[Sequence[Point]] = [poly for _, poly in pieces]
    closed_flags = [True] * len(polys)
    if include_segment:
        polys.append(ifs.segment)
        closed_flags.append(False)
    scaled = _scale_to_integers(polys)
    nodes = [_Node(pts, closed) for pts, closed in zip(scaled, closed_flags)]
    uf = UnionFind(len(nodes))
    adjacency = []
    for i, j in _candidate_pairs(nodes):
        if nodes_touch(nodes[i], nodes[j]):
            adjacency.append((i, j))
            uf.union(i, j)
    roots = tuple(uf.find(i) for i in range(len(nodes)))
    return PieceGraph(
        tuple(word for word, _ in pieces),
        tuple(adjacency),
        roots,
        len(pieces) if include_segment else None,
    )


@dataclass(frozen=True)
class ConnectivityReport:
    depth: int
    piece_count: int
    component_count: int

    @property
    def connected(self) -> bool:
        return self.component_count == 1


def verify_augmented_connected(
    ifs: PlanarSimilarIFS, depth: int, budget: int = DEFAULT_PIECE_BUDGET
) -> ConnectivityReport:
    """Is the union of depth-k pieces plus the pinned segment connected?"""
    graph = piece_graph(ifs, depth, include_segment=True, budget=budget)
    return ConnectivityReport(
        depth, len(graph.words), graph.component_count
    )


@dataclass(frozen=True)
class OriginAbsorptionReport:
    checked_words: tuple[Word, ...]
    component_failures: tuple[Word, ...]
    witness_failures: tuple[Word, ...]

    @property
    def passed(self) -> bool:
        return not self.component_failures and not self.witness_failures


def verify_origin_absorption(
    ifs: PlanarSimilarIFS, depth: int, budget: int = DEFAULT_PIECE_BUDGET
) -> OriginAbsorptionReport:
    """Bridge-prefixed anchor words join the origin's component.

    For every word in bridge^(m) anchor with m+1 <= depth, the word's piece
    must share a component with the origin piece (segment excluded from the
    graph), and the induction's touching pair must intersect exactly: some
    anchor child of the bridge prefix meets the piece of the prefix with its
    last bridge symbol replaced by that symbol's witness anchor.
    """
    checked: list[Word] = []
    component_failures: list[Word] = []
    witness_failures: list[Word] = []
    for length in range(1, depth + 1):
        graph = piece_graph(ifs, length, include_segment=False, budget=budget)
        index = {w: i for i, w in enumerate(graph.words)}
        origin_root = graph.component_roots[
            index[tuple(ifs.origin_index for _ in range(length))]
        ]
        for prefix in itertools.product(ifs.bridge_class, repeat=length - 1):
            for last in ifs.anchor_class:
                word = prefix + (last,)
                checked.append(word)
                if graph.component_roots[index[word]] != origin_root:
                    component_failures.append(word)
                if length >= 2:
                    witness = prefix[:-1] + (ifs.bridge_witness[prefix[-1]],)
                    witness_poly = ifs.piece(witness)
                    touched = any(
                        exact_touch(ifs.piece(prefix + (a,)), witness_poly)
                        for a in ifs.anchor_class
                    )
                    if not touched:
                        witness_failures.append(word)
    return OriginAbsorptionReport(
        tuple(checked), tuple(component_failures), tuple(witness_failures)
    )


def exact_touch(
    poly_a: Sequence[Point],
    poly_b: Sequence[Point],
    closed_a: bool = True,
    closed_b: bool = True,
) -> bool:
    """Exact intersection of two rational polylines (scaled jointly)."""
    scaled = _scale_to_integers([poly_a, poly_b])
    return nodes_touch(_Node(scaled[0], closed_a), _Node(scaled[1], closed_b))


@dataclass(frozen=True)
class SingletonCensus:
    depth: int
    singleton_words: tuple[Word, ...]
    violations: tuple[Word, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def _case_analysis_escape(ifs: PlanarSimilarIFS, word: Word) -> bool:
    """An isolated symbol followed by bridge* anchor: handled by induction."""
    isolated = set(ifs.isolated_class)
    bridge = set(ifs.bridge_class)
    anchor = set(ifs.anchor_class)
    for i, symbol in enumerate(word):
        if symbol not in isolated:
            continue
        for j in range(i + 1, len(word)):
            if word[j] in anchor:
                return True
            if word[j] not in bridge:
                break
    return False


def singleton_census(
    ifs: PlanarSimilarIFS, depth: int, budget: int = DEFAULT_PIECE_BUDGET
) -> SingletonCensus:
    """Isolated depth-k pieces must meet the segment or match the induction.

    A word whose piece touches no other piece is a candidate region for
    isolated attractor points; it passes when its piece meets the pinned
    segment exactly, or when its symbols contain an isolated-class symbol
    whose tail starts bridge* anchor (those regions reconnect deeper).
    Everything else is a violation.  This is a finite shadow: it can refute
    but never fully prove the segment-pinning claim.
    """
    graph = piece_graph(ifs, depth, include_segment=False, budget=budget)
    singletons = []
    violations = []
    for i, word in enumerate(graph.words):
        if len(graph.component_members(i)) != 1:
            continue
        singletons.append(word)
        if exact_touch(ifs.piece(word), ifs.segment, closed_b=False):
            continue
        if _case_analysis_escape(ifs, word):
            continue
        violations.append(word)
    return SingletonCensus(depth, tuple(singletons), tuple(violations))


def isolated_class_disjointness(
    ifs: PlanarSimilarIFS, max_rank: int = 2
) -> int | None:
    """First rank at which isolated-class pieces avoid all other pieces."""
    for rank in range(1, max_rank + 1):
        pieces = ifs.pieces(rank)
        scaled = _scale_to_integers([poly for _, poly in pieces])
        isolated_nodes = []
        other_nodes = []
        for (word, _), pts in zip(pieces, scaled):
            node = _Node(pts, closed=True)
            if word[0] in ifs.isolated_class:
                isolated_nodes.append(node)
            else:
                other_nodes.append(node)
        if not any(
            nodes_touch(a, b) for a in isolated_nodes for b in other_nodes
        ):
            return rank
    return None
