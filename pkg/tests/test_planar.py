from fractions import Fraction

import pytest

from spongeslice.core import BudgetError, SpecError
from spongeslice.planar import (
    PlanarMap,
    PlanarSimilarIFS,
    exact_touch,
    isolated_class_disjointness,
    perturbed_trapezoid_ifs,
    piece_graph,
    segments_intersect,
    singleton_census,
    trapezoid_ifs,
    verify_augmented_connected,
    verify_origin_absorption,
)

F = Fraction


def test_segment_predicates():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))  # proper crossing
    assert segments_intersect((0, 0), (1, 0), (1, 0), (1, 1))  # endpoint touch
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))  # collinear overlap
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))  # collinear gap


def test_exact_touch_shared_edge_and_point():
    square = ((F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(0)))
    shifted = tuple((x + 1, y) for x, y in square)
    corner = tuple((x + 1, y + 1) for x, y in square)
    far = tuple((x + 3, y) for x, y in square)
    assert exact_touch(square, shifted)
    assert exact_touch(square, corner)
    assert not exact_touch(square, far)


def test_builtin_map_data():
    ifs = trapezoid_ifs()
    ratios = [m.ratio for m in ifs.maps]
    assert ratios == [
        F(2, 3), F(1, 3), F(1, 3), F(1, 6), F(1, 6), F(1, 3), F(1, 12)
    ]
    assert ifs.maps[6].shift == (F(11, 12), F(17, 24))
    assert ifs.segment == ((F(1), F(1, 2)), (F(1), F(1)))
    assert ifs.origin_index == 0


def test_maps_send_hull_into_hull_bbox():
    ifs = trapezoid_ifs()
    for m in ifs.maps:
        for p in ifs.hull:
            x, y = m(p)
            assert 0 <= x <= 1 and 0 <= y <= 1


def test_hull_with_segment_connected_at_depth_zero():
    report = verify_augmented_connected(trapezoid_ifs(), 0)
    assert report.connected and report.piece_count == 1


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_piece_unions_connected(depth):
    report = verify_augmented_connected(trapezoid_ifs(), depth)
    assert report.connected
    assert report.piece_count == 7**depth


def test_piece_budget():
    with pytest.raises(BudgetError):
        verify_augmented_connected(trapezoid_ifs(), 6, budget=10_000)


def test_isolated_piece_only_touches_segment_at_rank_one():
    ifs = trapezoid_ifs()
    graph = piece_graph(ifs, 1, include_segment=True)
    isolated_index = graph.words.index((6,))
    neighbours = {
        j if i == isolated_index else i
        for i, j in graph.adjacency
        if isolated_index in (i, j)
    }
    assert neighbours == {graph.segment_index}
    assert isolated_class_disjointness(ifs) == 1


def test_anchor_block_contains_origin_at_depth_one():
    ifs = trapezoid_ifs()
    graph = piece_graph(ifs, 1, include_segment=False)
    roots = {
        graph.component_roots[graph.words.index((a,))] for a in ifs.anchor_class
    }
    assert len(roots) == 1


def test_origin_absorption_passes():
    report = verify_origin_absorption(trapezoid_ifs(), 4)
    assert report.passed
    assert len(report.checked_words) == 4 + 2 * 4 + 4 * 4 + 8 * 4


def test_specific_witness_pairs_intersect():
    ifs = trapezoid_ifs()
    # bridge symbol 4 hands over through anchor 3, bridge 5 through anchor 0
    assert exact_touch(ifs.piece((4, 0)), ifs.piece((3,)))
    assert exact_touch(ifs.piece((5, 1)), ifs.piece((0,)))


def test_singleton_census_clean_up_to_depth_three():
    ifs = trapezoid_ifs()
    for depth in (1, 2, 3):
        census = singleton_census(ifs, depth)
        assert census.passed
    assert singleton_census(ifs, 1).singleton_words == ((6,),)


def test_singletons_live_in_bridge_isolated_alphabet():
    census = singleton_census(trapezoid_ifs(), 3)
    for word in census.singleton_words:
        assert all(symbol in (4, 5, 6) for symbol in word)


def test_perturbed_system_reports_violations():
    bad = perturbed_trapezoid_ifs()
    for depth in (1, 2):
        census = singleton_census(bad, depth)
        assert not census.passed
    assert (6,) in singleton_census(bad, 1).violations


def test_classes_must_partition():
    ifs = trapezoid_ifs()
    with pytest.raises(SpecError, match="partition"):
        PlanarSimilarIFS(
            ifs.maps,
            ifs.hull,
            ifs.segment,
            anchor_class=(0, 1, 2),
            bridge_class=(4, 5),
            isolated_class=(6,),
            bridge_witness=ifs.bridge_witness,
        )


def test_planar_map_composition():
    a = PlanarMap(F(1, 2), (F(1, 2), F(0)))
    b = PlanarMap(F(1, 3), (F(0), F(2, 3)))
    ab = a.after(b)
    assert ab.ratio == F(1, 6)
    point = (F(1), F(1))
    assert ab(point) == a(b(point))
