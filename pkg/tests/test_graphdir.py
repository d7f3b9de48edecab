import itertools

import pytest

from spongeslice import catalog
from spongeslice.core import SpecError, SpongeSpec, BaseIFS, box_contains
from spongeslice.graphdir import (
    ComponentSystem,
    approximate_invariant_sets,
    build_graph_ifs,
    suggest_free_role,
    verify_component_structure,
)


def spur_system():
    roles = catalog.boundary_spur_roles()
    return ComponentSystem.create(
        catalog.boundary_spur_carpet(),
        attached_to_free=roles["xy"],
        free_to_free=roles["yy"],
        free_to_attached=roles["yx"],
    )


def test_adjacency_matrix_matches_printed_counts():
    graph = build_graph_ifs(spur_system())
    assert graph.adjacency_matrix() == tuple(
        tuple(row) for row in catalog.boundary_spur_adjacency()
    )


def test_default_complement_roles():
    spec = catalog.boundary_spur_carpet()
    roles = catalog.boundary_spur_roles()
    system = ComponentSystem.create(
        spec, attached_to_free=roles["xy"], free_to_free=roles["yy"]
    )
    # default free_to_attached keeps the spur digit, giving column sum 20
    matrix = build_graph_ifs(system).adjacency_matrix()
    assert matrix[0][1] + matrix[1][1] == 20
    assert matrix == ((17, 15), (3, 5))


def test_decoupled_roles_give_diagonal_matrix():
    spec = catalog.boundary_spur_carpet()
    system = ComponentSystem.create(spec, attached_to_free=(), free_to_free=spec.digits)
    matrix = build_graph_ifs(system).adjacency_matrix()
    n = len(spec.digits)
    assert matrix == ((n, 0), (0, n))


def test_vertex_without_outgoing_edge_rejected():
    bases = (BaseIFS.uniform(4), BaseIFS.uniform(4))
    spec = SpongeSpec(bases, ((1, 1),))
    with pytest.raises(SpecError, match="no outgoing edge"):
        ComponentSystem.create(
            spec,
            attached_to_free=((1, 1),),
            free_to_free=(),
            free_to_attached=(),
        )


def test_digit_with_two_roles_rejected():
    spec = catalog.boundary_spur_carpet()
    with pytest.raises(SpecError, match="two roles"):
        ComponentSystem.create(
            spec,
            attached_to_free=((0, 1),),
            free_to_free=((0, 1),),
            attached_to_attached=spec.digits,
        )


def test_depth_zero_approximation_is_unit_square():
    graph = build_graph_ifs(spur_system())
    sets = approximate_invariant_sets(graph, 0)
    for pieces in sets.values():
        assert len(pieces) == 1
        assert pieces[0].box == (((0), (1)), ((0), (1)))


def test_decoupled_approximation_matches_carpet_cells():
    spec = catalog.boundary_spur_carpet()
    system = ComponentSystem.create(spec, attached_to_free=(), free_to_free=spec.digits)
    graph = build_graph_ifs(system)
    sets = approximate_invariant_sets(graph, 2)
    expected = {w for w in itertools.product(spec.digits, repeat=2)}
    for pieces in sets.values():
        assert {p.word for p in pieces} == expected


def test_path_counts_match_adjacency_powers():
    graph = build_graph_ifs(spur_system())
    matrix = graph.adjacency_matrix()

    def column_sums(m):
        return [sum(row[j] for row in m) for j in range(len(m))]

    def mat_mul(a, b):
        size = len(a)
        return [
            [sum(a[i][k] * b[k][j] for k in range(size)) for j in range(size)]
            for i in range(size)
        ]

    power = [[1, 0], [0, 1]]
    for depth in (1, 2, 3):
        power = mat_mul(matrix, power)
        sets = approximate_invariant_sets(graph, depth)
        sums = column_sums(power)
        assert len(sets["attached"]) == sums[0]
        assert len(sets["free"]) == sums[1]


def test_approximations_are_nested():
    graph = build_graph_ifs(spur_system())
    shallow = approximate_invariant_sets(graph, 1)
    deep = approximate_invariant_sets(graph, 2)
    for name in ("attached", "free"):
        parents = {p.word: p.box for p in shallow[name]}
        for piece in deep[name]:
            assert box_contains(parents[piece.word[:1]], piece.box)


def test_structure_checks_pass_on_spur_carpet():
    report = verify_component_structure(spur_system(), 3)
    assert report.passed, report.failures()


def test_structure_checks_pass_decoupled_full_grid():
    digits = tuple(itertools.product(range(2), range(2)))
    spec = SpongeSpec((BaseIFS.uniform(2), BaseIFS.uniform(2)), digits, "full")
    system = ComponentSystem.create(spec, attached_to_free=(), free_to_free=digits)
    report = verify_component_structure(system, 2)
    assert report.passed, report.failures()


def test_structure_check_names_misassigned_digit():
    spec = catalog.boundary_spur_carpet()
    roles = catalog.boundary_spur_roles()
    # drop (0,0) from the attached vertex's roles entirely
    bad_attached = tuple(d for d in roles["xx"] if d != (0, 0))
    system = ComponentSystem.create(
        spec,
        attached_to_free=roles["xy"],
        free_to_free=roles["yy"],
        attached_to_attached=bad_attached,
        free_to_attached=roles["yx"],
    )
    report = verify_component_structure(system, 2)
    assert not report.passed
    assert any("(0, 0)" in c.detail for c in report.failures())


def test_structure_check_catches_wrong_free_roles():
    spec = catalog.boundary_spur_carpet()
    roles = catalog.boundary_spur_roles()
    # move the spur digit into the free vertex's support
    system = ComponentSystem.create(
        spec,
        attached_to_free=roles["xy"],
        free_to_free=roles["yy"] + ((7, 2),),
        free_to_attached=roles["yx"],
    )
    report = verify_component_structure(system, 2)
    assert not report.passed


def test_suggest_free_role_is_boundary_columns():
    spec = catalog.boundary_spur_carpet()
    suggestion = suggest_free_role(spec)
    assert all(d[0] in (0, 7) for d in suggestion)
    assert set(catalog.boundary_spur_roles()["yy"]) <= set(suggestion) | {(7, 2)}
