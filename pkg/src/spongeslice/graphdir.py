"""Directed-graph IFSs on the square and two-vertex component systems.

Role partitions are user-supplied (read off a digit-set picture, typically);
this module verifies them at finite depth rather than inferring them.  The
adjacency matrix follows the display convention: entry (i, j) counts edges
from vertex j to vertex i, so column sums count out-edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from spongeslice.core import (
    Box,
    BudgetError,
    Digit,
    DiagonalMap,
    SpecError,
    SpongeSpec,
    Word,
    box_contains,
    cell_box,
    unit_box,
)
from spongeslice.topology import build_approximation, components_of_words

DEFAULT_PATH_BUDGET = 200_000


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    label: Digit
    map: DiagonalMap


@dataclass(frozen=True)
class GraphIFS:
    """Vertices, labeled contraction edges, and the induced adjacency counts."""

    vertex_names: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        for edge in self.edges:
            for v in (edge.source, edge.target):
                if not 0 <= v < len(self.vertex_names):
                    raise SpecError(f"edge endpoint {v} out of range")
            if not edge.map.is_contracting():
                raise SpecError(f"edge {edge.label} carries a non-contracting map")
        for v, name in enumerate(self.vertex_names):
            if not any(e.source == v for e in self.edges):
                raise SpecError(f"vertex {name} has no outgoing edge")

    def out_edges(self, vertex: int) -> tuple[Edge, ...]:
        return tuple(
            sorted(
                (e for e in self.edges if e.source == vertex),
                key=lambda e: (e.label, e.target),
            )
        )

    def adjacency_matrix(self) -> tuple[tuple[int, ...], ...]:
        size = len(self.vertex_names)
        counts = [[0] * size for _ in range(size)]
        for e in self.edges:
            counts[e.target][e.source] += 1
        return tuple(tuple(row) for row in counts)


@dataclass(frozen=True)
class ComponentSystem:
    """Digit roles of a two-vertex system over a planar grid carpet.

    Vertex 0 is the *attached* context (its right edge glues to a neighbour),
    vertex 1 the *free* component.  Each role tuple lists the digits carrying
    an edge for that (source, target) pair; ``attached_*`` roles must
    partition the digit set, while the free vertex may drop digits whose
    cells its component never enters.
    """

    spec: SpongeSpec
    attached_to_attached: tuple[Digit, ...]
    attached_to_free: tuple[Digit, ...]
    free_to_attached: tuple[Digit, ...]
    free_to_free: tuple[Digit, ...]

    def __post_init__(self):
        if self.spec.dimension != 2 or not self.spec.is_grid:
            raise SpecError("component systems live on 2-dimensional grid specs")
        digit_set = self.spec.digit_set
        for name, role in self.roles().items():
            for d in role:
                if d not in digit_set:
                    raise SpecError(f"role {name}: digit {d} not in the digit set")
        for source, (a, b) in (
            ("attached", (self.attached_to_attached, self.attached_to_free)),
            ("free", (self.free_to_attached, self.free_to_free)),
        ):
            doubled = set(a) & set(b)
            if doubled:
                raise SpecError(
                    f"digit {sorted(doubled)[0]} assigned two roles out of the "
                    f"{source} vertex"
                )
        if not self.attached_to_attached and not self.attached_to_free:
            raise SpecError("vertex attached has no outgoing edge")
        if not self.free_to_attached and not self.free_to_free:
            raise SpecError("vertex free has no outgoing edge")

    @classmethod
    def create(
        cls,
        spec: SpongeSpec,
        attached_to_free: Iterable[Digit] = (),
        free_to_free: Iterable[Digit] = (),
        attached_to_attached: Iterable[Digit] | None = None,
        free_to_attached: Iterable[Digit] | None = None,
    ) -> "ComponentSystem":
        """Build roles, defaulting to complements of the given target lists."""
        to_free = tuple(sorted(set(map(tuple, attached_to_free))))
        free_free = tuple(sorted(set(map(tuple, free_to_free))))
        if attached_to_attached is None:
            attached_to_attached = tuple(
                d for d in spec.digits if d not in set(to_free)
            )
        if free_to_attached is None:
            free_to_attached = tuple(
                d for d in spec.digits if d not in set(free_free)
            )
        return cls(
            spec,
            tuple(sorted(set(map(tuple, attached_to_attached)))),
            to_free,
            tuple(sorted(set(map(tuple, free_to_attached)))),
            free_free,
        )

    def roles(self) -> dict[str, tuple[Digit, ...]]:
        return {
            "attached_to_attached": self.attached_to_attached,
            "attached_to_free": self.attached_to_free,
            "free_to_attached": self.free_to_attached,
            "free_to_free": self.free_to_free,
        }


def build_graph_ifs(system: ComponentSystem) -> GraphIFS:
    """Two-vertex graph whose edges carry the digit maps of the carpet."""
    spec = system.spec
    edges = []
    for (source, target), role in (
        ((0, 0), system.attached_to_attached),
        ((0, 1), system.attached_to_free),
        ((1, 0), system.free_to_attached),
        ((1, 1), system.free_to_free),
    ):
        for digit in role:
            edges.append(Edge(source, target, digit, spec.digit_map(digit)))
    return GraphIFS(("attached", "free"), tuple(sorted_edges(edges)))


def sorted_edges(edges):
    return sorted(edges, key=lambda e: (e.source, e.label, e.target))


@dataclass(frozen=True)
class PathPiece:
    word: Word
    box: Box


def approximate_invariant_sets(
    graph: GraphIFS, depth: int, max_paths: int = DEFAULT_PATH_BUDGET
) -> dict[str, tuple[PathPiece, ...]]:
    """Depth-k path images of the unit square, per start vertex.

    Piece count per vertex equals the number of directed paths, i.e. the
    column sum of the adjacency matrix power; the Hausdorff distance to the
    invariant set is at most (max ratio)^k.
    """
    if depth < 0:
        raise SpecError("depth must be nonnegative")
    dimension = graph.edges[0].map.dimension
    cube = unit_box(dimension)
    memo: dict[tuple[int, int], tuple[tuple[Word, DiagonalMap], ...]] = {}

    def paths(vertex: int, remaining: int):
        if remaining == 0:
            identity = DiagonalMap(
                tuple(1 for _ in range(dimension)), tuple(0 for _ in range(dimension))
            )
            return (((), identity),)
        key = (vertex, remaining)
        if key not in memo:
            out = []
            for edge in graph.out_edges(vertex):
                for word, tail_map in paths(edge.target, remaining - 1):
                    out.append(((edge.label,) + word, edge.map.after(tail_map)))
                    if len(out) > max_paths:
                        raise BudgetError(
                            f"more than {max_paths} paths at depth {depth}"
                        )
            memo[key] = tuple(out)
        return memo[key]

    result = {}
    for v, name in enumerate(graph.vertex_names):
        pieces = tuple(
            PathPiece(word, m.image_box(cube)) for word, m in paths(v, depth)
        )
        result[name] = tuple(sorted(pieces, key=lambda p: p.word))
    return result


def _vertex_words(system: ComponentSystem, depth: int) -> dict[str, set[Word]]:
    target_of = {}
    for digit in system.attached_to_attached:
        target_of[("attached", digit)] = "attached"
    for digit in system.attached_to_free:
        target_of[("attached", digit)] = "free"
    for digit in system.free_to_attached:
        target_of[("free", digit)] = "attached"
    for digit in system.free_to_free:
        target_of[("free", digit)] = "free"

    words: dict[str, set[Word]] = {"attached": {()}, "free": {()}}
    for _ in range(depth):
        grown: dict[str, set[Word]] = {"attached": set(), "free": set()}
        for vertex in ("attached", "free"):
            for digit in system.spec.digits:
                target = target_of.get((vertex, digit))
                if target is None:
                    continue
                for word in words[target]:
                    grown[vertex].add((digit,) + word)
        words = grown
    return words


@dataclass(frozen=True)
class StructureCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class StructureReport:
    checks: tuple[StructureCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[StructureCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def verify_component_structure(
    system: ComponentSystem, depth: int, max_cells: int = 500_000
) -> StructureReport:
    """Finite-depth evidence for the component-system reading of the roles.

    Checks, at every depth up to the requested one: (a) the free vertex's
    approximation contains the corner cell and is connected; (b) the roles
    partition the digit set per source vertex and the two set equations hold
    exactly as word-set identities; (c) every multi-cell component of the
    carpet approximation lies in some digit-word image of the free vertex's
    approximation.
    """
    spec = system.spec
    checks: list[StructureCheck] = []

    # (b) per-digit role coverage
    out_attached = set(system.attached_to_attached) | set(system.attached_to_free)
    missing = [d for d in spec.digits if d not in out_attached]
    checks.append(
        StructureCheck(
            "roles-cover-attached",
            not missing,
            "" if not missing else f"digit {missing[0]} has no role out of attached",
        )
    )

    words_by_depth = [_vertex_words(system, k) for k in range(depth + 1)]

    corner_digit = min(spec.digits)
    corner_ok = all(
        spec.bases[i].offsets[corner_digit[i]] == 0 for i in range(2)
    )
    for k in range(1, depth + 1):
        free_words = sorted(words_by_depth[k]["free"])
        corner_word = tuple(corner_digit for _ in range(k))
        contains_corner = corner_ok and corner_word in set(free_words)
        groups = components_of_words(spec, free_words)
        connected = len(groups) == 1
        checks.append(
            StructureCheck(
                f"free-approximation-depth-{k}",
                contains_corner and connected,
                ""
                if contains_corner and connected
                else f"corner={contains_corner}, components={len(groups)}",
            )
        )

        # (b) set equations as exact word-set identities
        for vertex, to_attached, to_free in (
            ("attached", system.attached_to_attached, system.attached_to_free),
            ("free", system.free_to_attached, system.free_to_free),
        ):
            recomposed = {
                (d,) + w for d in to_attached for w in words_by_depth[k - 1]["attached"]
            } | {(d,) + w for d in to_free for w in words_by_depth[k - 1]["free"]}
            actual = words_by_depth[k][vertex]
            if recomposed != actual:
                offending = sorted(recomposed ^ actual)[0]
                checks.append(
                    StructureCheck(
                        f"set-equation-{vertex}-depth-{k}",
                        False,
                        f"word {offending} breaks the identity",
                    )
                )
            else:
                checks.append(
                    StructureCheck(f"set-equation-{vertex}-depth-{k}", True)
                )

    # (c) confinement of multi-cell components in free-vertex images
    graph = build_approximation(spec, depth, max_cells)
    free_sets = [set(words_by_depth[k]["free"]) for k in range(depth + 1)]
    for comp in graph.components:
        if len(comp.cell_indices) < 2:
            continue
        words = graph.component_words(comp)
        prefix = _common_prefix(words)
        ok = False
        for cut in range(len(prefix), -1, -1):
            stripped = {w[cut:] for w in words}
            if stripped <= free_sets[depth - cut]:
                ok = True
                break
        checks.append(
            StructureCheck(
                f"component-{words[0]}-in-free-image",
                ok,
                "" if ok else f"component of {words[0]} escapes the free vertex",
            )
        )
    return StructureReport(tuple(checks))


def _common_prefix(words: Sequence[Word]) -> Word:
    first = min(words)
    last = max(words)
    out = []
    for a, b in zip(first, last):
        if a != b:
            break
        out.append(a)
    return tuple(out)


def suggest_free_role(spec: SpongeSpec) -> tuple[Digit, ...]:
    """Heuristic only: digits whose cells meet the left or right boundary.

    A starting point for writing a role file by inspection; it is not a
    verified role assignment (run verify_component_structure on the result).
    """
    if spec.dimension != 2:
        raise SpecError("the heuristic is planar")
    last = spec.bases[0].count - 1
    return tuple(d for d in spec.digits if d[0] in (0, last))
