"""Finite approximations of a sponge and their connectivity structure.

Depth-k approximations are unions of closed cells; adjacency means closed
boxes intersect, so touching at corners counts.  For slicing specs the
level-k intervals of each coordinate partition [0,1] in lexicographic order,
which turns adjacency into an integer Chebyshev-distance test on per-word
grid ranks; no box arithmetic enters the hot path.

The module only semi-decides trivial-point existence: finding an island
proves there are trivial points, and caller-supplied witness codings drive
the interior-witness construction.  Nothing here decides the absence of
trivial points.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from spongeslice.coding import Coding, sponge_point
from spongeslice.core import (
    Box,
    BudgetError,
    Cell,
    Digit,
    SpecError,
    SpongeSpec,
    Word,
    boxes_intersect,
    cell_box,
)
from spongeslice.faces import Face, containing_face

DEFAULT_CELL_BUDGET = 300_000
DEFAULT_LAYER_DEPTH = 6
DEFAULT_COMPONENT_DEPTH = 8
DIAMETER_BOUND_SQUARED = Fraction(1, 9)


class UnionFind:
    """Disjoint sets over 0..n-1; the root is always the smallest member."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb


@dataclass(frozen=True)
class Component:
    cell_indices: tuple[int, ...]
    bounding_box: Box
    touches_boundary: bool


@dataclass(frozen=True)
class ApproximationGraph:
    spec: SpongeSpec
    depth: int
    cells: tuple[Cell, ...]
    adjacency: tuple[tuple[int, int], ...]
    component_roots: tuple[int, ...]
    components: tuple[Component, ...]

    def component_of_cell(self, index: int) -> Component:
        root = self.component_roots[index]
        for comp in self.components:
            if comp.cell_indices[0] == root:
                return comp
        raise KeyError(index)

    def component_words(self, comp: Component) -> tuple[Word, ...]:
        return tuple(self.cells[i].word for i in comp.cell_indices)

    def cell_index(self, word: Word) -> int:
        lookup = self.__dict__.get("_word_index")
        if lookup is None:
            lookup = {cell.word: i for i, cell in enumerate(self.cells)}
            self.__dict__["_word_index"] = lookup
        return lookup[word]


def _cells_touch_boundary(cell: Cell) -> bool:
    return any(lo == 0 or hi == 1 for lo, hi in cell.box)


def _grid_adjacency(spec: SpongeSpec, words: Sequence[Word], threads: int):
    ranks = [spec.word_ranks(w) for w in words]
    index = {r: i for i, r in enumerate(ranks)}
    deltas = [
        d for d in itertools.product((-1, 0, 1), repeat=spec.dimension) if any(d)
    ]

    def chunk_pairs(lo: int, hi: int) -> list[tuple[int, int]]:
        pairs = []
        for i in range(lo, hi):
            r = ranks[i]
            for delta in deltas:
                j = index.get(tuple(a + b for a, b in zip(r, delta)))
                if j is not None and j > i:
                    pairs.append((i, j))
        return pairs

    n = len(words)
    if threads <= 1 or n < 1000:
        return chunk_pairs(0, n)
    step = (n + threads - 1) // threads
    bounds = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(lambda b: chunk_pairs(*b), bounds))
    out: list[tuple[int, int]] = []
    for chunk in chunks:
        out.extend(chunk)
    return out


def _generic_adjacency(cells: Sequence[Cell]) -> list[tuple[int, int]]:
    order = sorted(range(len(cells)), key=lambda i: cells[i].box[0][0])
    pairs = []
    for pos, i in enumerate(order):
        xi_hi = cells[i].box[0][1]
        for j in order[pos + 1 :]:
            if cells[j].box[0][0] > xi_hi:
                break
            if boxes_intersect(cells[i].box, cells[j].box):
                pairs.append((min(i, j), max(i, j)))
    return pairs


def build_approximation(
    spec: SpongeSpec,
    depth: int,
    max_cells: int = DEFAULT_CELL_BUDGET,
    threads: int = 1,
) -> ApproximationGraph:
    """Cells, adjacency and components of the depth-k approximation."""
    if depth < 0:
        raise SpecError("depth must be nonnegative")
    count = len(spec.digits) ** depth
    if count > max_cells:
        raise BudgetError(
            f"{count} cells at depth {depth} exceed the budget of {max_cells}"
        )
    words = list(itertools.product(spec.digits, repeat=depth))
    cells = tuple(cell_box(spec, w) for w in words)
    if spec.is_slicing:
        pairs = _grid_adjacency(spec, words, threads)
    else:
        pairs = _generic_adjacency(cells)
    adjacency = tuple(sorted(set(pairs)))
    uf = UnionFind(len(cells))
    for i, j in adjacency:
        uf.union(i, j)
    roots = tuple(uf.find(i) for i in range(len(cells)))
    groups: dict[int, list[int]] = {}
    for i, root in enumerate(roots):
        groups.setdefault(root, []).append(i)
    components = []
    for root in sorted(groups):
        members = groups[root]
        box = tuple(
            (
                min(cells[i].box[k][0] for i in members),
                max(cells[i].box[k][1] for i in members),
            )
            for k in range(spec.dimension)
        )
        touches = any(_cells_touch_boundary(cells[i]) for i in members)
        components.append(Component(tuple(members), box, touches))
    return ApproximationGraph(
        spec, depth, cells, adjacency, roots, tuple(components)
    )


def islands(graph: ApproximationGraph) -> tuple[Component, ...]:
    """Components staying clear of the cube boundary."""
    return tuple(c for c in graph.components if not c.touches_boundary)


def components_of_words(
    spec: SpongeSpec, words: Sequence[Word]
) -> tuple[tuple[Word, ...], ...]:
    """Connected components of an arbitrary cell collection, as word groups."""
    words = list(words)
    if spec.is_slicing:
        pairs = _grid_adjacency(spec, words, threads=1)
    else:
        pairs = _generic_adjacency([cell_box(spec, w) for w in words])
    uf = UnionFind(len(words))
    for i, j in pairs:
        uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(words)):
        groups.setdefault(uf.find(i), []).append(i)
    return tuple(
        tuple(words[i] for i in groups[root]) for root in sorted(groups)
    )


@dataclass(frozen=True)
class LayerSet:
    """All depth-k cells sharing an anchor word's corner projection."""

    anchor: Word
    part_a: tuple[int, ...]
    words: tuple[Word, ...]

    @property
    def depth(self) -> int:
        return len(self.anchor)


def layer_set(
    spec: SpongeSpec,
    anchor: Word,
    part_a: Iterable[int],
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> LayerSet:
    """Membership by exact projected-corner equality.

    Requires an equal-ratio (grid) spec; slicing callers convert through the
    associated grid spec first.  Matching corner projections is equivalent to
    matching digits position by position on the projected coordinates, so
    the layer factorizes into per-position digit choices.
    """
    if not spec.is_grid:
        raise SpecError(
            "layer sets are defined on the associated grid spec; convert first"
        )
    anchor = tuple(tuple(d) for d in anchor)
    part_a = tuple(sorted(set(part_a)))
    for i in part_a:
        if not 0 <= i < spec.dimension:
            raise SpecError(f"coordinate {i} out of range")
    choices = []
    size = 1
    for sigma_digit in anchor:
        allowed = tuple(
            d for d in spec.digits if all(d[i] == sigma_digit[i] for i in part_a)
        )
        choices.append(allowed)
        size *= len(allowed)
        if size > max_cells:
            raise BudgetError(f"layer would hold more than {max_cells} cells")
    words = tuple(itertools.product(*choices))
    return LayerSet(anchor, part_a, words)


def face_meets_box(face: Face, box: Box) -> bool:
    for i in range(face.dimension):
        if not face.free_mask >> i & 1:
            lo, hi = box[i]
            if not lo <= face.pinned_value(i) <= hi:
                return False
    return True


def trivial_shift(
    spec: SpongeSpec,
    anchor: Word,
    face: Face,
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> Word:
    """The layer word whose image leaves the face (deterministic selection).

    Requires the anchor's layer to be disconnected or to miss the face.  The
    survivor comes from a face-avoiding component: minimise the corner sum
    over coordinates pinned at 0, then maximise over coordinates pinned at 1,
    breaking ties by lexicographic order.
    """
    layer = layer_set(spec, anchor, face.free_coordinates(), max_cells)
    cells = {w: cell_box(spec, w) for w in layer.words}
    meets = [w for w in layer.words if face_meets_box(face, cells[w].box)]
    groups = components_of_words(spec, layer.words)
    if len(groups) == 1 and meets:
        raise SpecError(
            "layer is connected and meets the face: no shift available"
        )
    avoiding = []
    meet_set = set(meets)
    for group in groups:
        if not any(w in meet_set for w in group):
            avoiding.append(group)
    if not avoiding:
        raise SpecError("every component of the layer meets the face")
    group = min(avoiding, key=lambda g: min(g))
    zero_pinned = [
        i for i in face.pinned_coordinates() if face.pinned_value(i) == 0
    ]
    one_pinned = [
        i for i in face.pinned_coordinates() if face.pinned_value(i) == 1
    ]

    def key(word: Word):
        corner = cells[word].corner()
        low_sum = sum((corner[i] for i in zero_pinned), Fraction(0))
        high_sum = sum((corner[i] for i in one_pinned), Fraction(0))
        return (low_sum, -high_sum, word)

    return min(group, key=key)


@dataclass(frozen=True)
class TrivialStage:
    shift_word: Word
    face_before: Face
    face_after: Face
    point_after: tuple[Fraction, ...]


@dataclass(frozen=True)
class TrivialPointReport:
    witness: Coding
    stages: tuple[TrivialStage, ...]
    final_face: Face
    point: tuple[Fraction, ...]
    used_grid_conjugacy: bool


def interior_trivial_point(
    spec: SpongeSpec,
    coding: Coding,
    layer_depth: int = DEFAULT_LAYER_DEPTH,
    component_depth: int = DEFAULT_COMPONENT_DEPTH,
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> TrivialPointReport:
    """Push a trivial point into the open cube, stage by stage.

    The caller asserts the coding describes a trivial point (for example an
    island witness).  Slicing specs are transported through the coding-
    preserving conjugacy and the construction runs on the associated grid
    spec; the face dimension strictly increases at every stage, so at most
    `d` stages happen.
    """
    if not spec.is_slicing:
        raise SpecError("interior witnesses are constructed for slicing specs")
    if spec.is_degenerate:
        raise SpecError(
            "degenerate spec: reduce to the non-degenerate lower-dimensional "
            "sponge first (see SpongeSpec.reduce_degenerate)"
        )
    if not coding.is_periodic:
        raise SpecError("witness codings must be eventually periodic")
    used_conjugacy = not spec.is_grid
    grid = spec.associated_grid_spec() if used_conjugacy else spec
    for s in coding.prefix + coding.cycle:
        if tuple(s) not in grid.digit_set:
            raise SpecError(f"coding symbol {s} not in the digit set")

    point = sponge_point(grid, coding)
    face = containing_face(point)
    stages: list[TrivialStage] = []
    while not face.is_full_cube:
        shift = None
        for k in range(1, layer_depth + 1):
            anchor = coding.symbols(k)
            layer = layer_set(grid, anchor, face.free_coordinates(), max_cells)
            meets = any(
                face_meets_box(face, cell_box(grid, w).box) for w in layer.words
            )
            groups = components_of_words(grid, layer.words)
            if len(groups) > 1 or not meets:
                shift = trivial_shift(grid, anchor, face, max_cells)
                break
        if shift is None:
            depth = _small_component_depth(
                grid, coding, component_depth, max_cells
            )
            digit = _face_avoiding_digit(grid, face)
            anchor = (digit,) + coding.symbols(depth)
            shift = trivial_shift(grid, anchor, face, max_cells)
        new_coding = coding.prepend(shift)
        new_point = grid.word_map(shift)(point)
        if face.contains_point(new_point):
            raise SpecError("shift failed to leave the face")
        new_face = containing_face(new_point)
        if new_face.face_dim < face.face_dim + 1:
            raise SpecError("face dimension did not increase")
        stages.append(TrivialStage(shift, face, new_face, new_point))
        coding, point, face = new_coding, new_point, new_face
    return TrivialPointReport(coding, tuple(stages), face, point, used_conjugacy)


def _small_component_depth(
    spec: SpongeSpec, coding: Coding, component_depth: int, max_cells: int
) -> int:
    """Least depth at which the witness's component has diameter below 1/3.

    The diameter is over-approximated by the component's bounding-box
    diagonal; sound, possibly not minimal.
    """
    for depth in range(1, component_depth + 1):
        if len(spec.digits) ** depth > max_cells:
            break
        graph = build_approximation(spec, depth, max_cells)
        idx = graph.cell_index(coding.symbols(depth))
        comp = graph.component_of_cell(idx)
        diag_sq = sum(
            (hi - lo) ** 2 for lo, hi in comp.bounding_box
        )
        if diag_sq < DIAMETER_BOUND_SQUARED:
            return depth
    raise BudgetError(
        "no depth within budget gives the witness a small enough component"
    )


def _face_avoiding_digit(spec: SpongeSpec, face: Face) -> Digit:
    """Least digit whose cell misses the face; exists for non-degenerate specs."""
    for digit in spec.digits:
        box = cell_box(spec, (digit,)).box
        if not face_meets_box(face, box):
            return digit
    raise SpecError("every first-level cell meets the face")


@dataclass(frozen=True)
class CoverDatum:
    """Certificate that the connected part lives inside a proper sub-IFS.

    ``island_words`` are the depth-k0 words forming islands; the sub-IFS is
    the iteration's remaining words.  A coding visiting an island block
    infinitely often describes a trivial point, so every non-trivial
    component stays inside images of the sub-IFS attractor.
    """

    depth: int
    island_words: tuple[Word, ...]
    sub_words: tuple[Word, ...]


@dataclass(frozen=True)
class CoverSearch:
    datum: CoverDatum | None
    searched_depth: int
    reason: str  # "found" | "exhausted" | "budget"
    reduced_spec: SpongeSpec | None = None
    kept_coordinates: tuple[int, ...] | None = None


def connected_part_cover(
    spec: SpongeSpec,
    max_depth: int,
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> CoverSearch:
    """Search increasing depths for islands; failure is a value, not an error."""
    if not spec.is_slicing:
        raise SpecError("sub-IFS covers are defined for slicing specs")
    reduced = None
    kept = None
    if spec.is_degenerate:
        spec, kept = spec.reduce_degenerate()
        reduced = spec
    for depth in range(1, max_depth + 1):
        if len(spec.digits) ** depth > max_cells:
            return CoverSearch(None, depth - 1, "budget", reduced, kept)
        graph = build_approximation(spec, depth, max_cells)
        isl = islands(graph)
        if isl:
            island_words = tuple(
                sorted(w for comp in isl for w in graph.component_words(comp))
            )
            island_set = set(island_words)
            sub_words = tuple(
                w
                for w in itertools.product(spec.digits, repeat=depth)
                if w not in island_set
            )
            return CoverSearch(
                CoverDatum(depth, island_words, sub_words),
                depth,
                "found",
                reduced,
                kept,
            )
    return CoverSearch(None, max_depth, "exhausted", reduced, kept)


@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    failure: str = ""
    offending_word: Word | None = None


def cover_check(
    spec: SpongeSpec,
    datum: CoverDatum,
    iterations: int,
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> CoverCheck:
    """Finite-depth confinement check of a cover certificate.

    First revalidates the datum (each listed word really belongs to an
    island of the depth-k0 approximation), then verifies at raw depth
    ``iterations * k0`` that every multi-cell component passing through an
    aligned island block stays inside that block's cell.
    """
    k0 = datum.depth
    island_set = set(datum.island_words)
    if island_set:
        graph0 = build_approximation(spec, k0, max_cells)
        island_words_actual = {
            w
            for comp in islands(graph0)
            for w in graph0.component_words(comp)
        }
        for w in datum.island_words:
            if w not in island_words_actual:
                return CoverCheck(False, "not an island word", w)
    depth = iterations * k0
    if len(spec.digits) ** depth > max_cells:
        raise BudgetError(
            f"{len(spec.digits) ** depth} cells exceed the budget of {max_cells}"
        )
    graph = build_approximation(spec, depth, max_cells)
    for comp in graph.components:
        if len(comp.cell_indices) < 2:
            continue
        words = graph.component_words(comp)
        for w in words:
            for start in range(0, depth - k0 + 1, k0):
                if w[start : start + k0] in island_set:
                    prefix = w[: start + k0]
                    for other in words:
                        if other[: start + k0] != prefix:
                            return CoverCheck(
                                False, "component escapes an island block", w
                            )
    return CoverCheck(True)
