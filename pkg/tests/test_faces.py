import itertools
import random
from fractions import Fraction

import pytest

from spongeslice.core import DiagonalMap, SpecError
from spongeslice.faces import (
    Face,
    all_faces,
    containing_face,
    face_meets_translate,
    map_face,
)

F = Fraction


def test_interior_point_gives_full_cube():
    face = containing_face((F(1, 3), F(1, 2)))
    assert face.is_full_cube
    assert face.face_dim == 2


def test_origin_gives_vertex():
    face = containing_face((F(0), F(0), F(0)))
    assert face.face_dim == 0
    assert face.offset_mask == 0


def test_edge_point():
    face = containing_face((F(1, 2), F(1)))
    assert face.free_coordinates() == (0,)
    assert face.pinned_coordinates() == (1,)
    assert face.pinned_value(1) == 1
    assert str(face) == "[0,1]x{1}"


def test_point_outside_cube_rejected():
    with pytest.raises(SpecError, match="outside the cube"):
        containing_face((F(2), F(0)))


def test_face_count():
    for d in (1, 2, 3):
        assert len(list(all_faces(d))) == 3**d


def test_barycenter_roundtrip():
    for d in (1, 2, 3, 4):
        for face in all_faces(d):
            assert containing_face(face.barycenter()) == face


def test_bottom_edge_translates():
    face = Face.from_parts(2, free=[0], pinned_at_one=[])  # [0,1] x {0}
    assert face_meets_translate(face, (0, -1))
    assert face_meets_translate(face, (0, 0))
    assert not face_meets_translate(face, (0, 1))
    assert not face_meets_translate(face, (1, 0))


def test_right_edge_translates_exhaustive():
    face = Face.from_parts(2, free=[1], pinned_at_one=[0])  # {1} x [0,1]
    hits = {
        u
        for u in itertools.product((-1, 0, 1), repeat=2)
        if face_meets_translate(face, u)
    }
    assert hits == {(0, 0), (1, 0)}


def _relint_meets_translate_oracle(face: Face, u) -> bool:
    # Exact interval logic, independent of the digit test: the relative
    # interior is a product of open (0,1) and single-point factors.
    for i in range(face.dimension):
        lo, hi = F(u[i]), F(u[i] + 1)
        if face.free_mask >> i & 1:
            if not (lo < 1 and hi > 0):
                return False
        else:
            b = face.pinned_value(i)
            if not lo <= b <= hi:
                return False
    return True


@pytest.mark.parametrize("d", [1, 2, 3])
def test_translate_test_matches_geometric_oracle(d):
    for face in all_faces(d):
        for u in itertools.product((-1, 0, 1), repeat=d):
            assert face_meets_translate(face, u) == _relint_meets_translate_oracle(
                face, u
            )


def test_map_face_keeps_fixed_face():
    g = DiagonalMap((F(1, 2), F(1, 2)), (F(0), F(1, 2)))
    face = Face.from_parts(2, free=[1], pinned_at_one=[])  # {0} x [0,1]
    assert map_face(g, face) == face


def test_map_face_into_interior():
    g = DiagonalMap((F(1, 2), F(1, 2)), (F(1, 4), F(0)))
    face = Face.from_parts(2, free=[1], pinned_at_one=[])
    image = map_face(g, face)
    assert image.is_full_cube
    assert image.face_dim == face.face_dim + 1


def test_map_face_rejects_escaping_map():
    g = DiagonalMap((F(1, 2), F(1, 2)), (F(3, 4), F(0)))
    with pytest.raises(SpecError, match="cube"):
        map_face(g, Face.full_cube(2))


def _random_cube_map(rng, d):
    scales, shifts = [], []
    for _ in range(d):
        a = F(rng.randint(1, 9), rng.randint(10, 20))
        t = (1 - a) * F(rng.randint(0, 8), 8)
        scales.append(a)
        shifts.append(t)
    return DiagonalMap(tuple(scales), tuple(shifts))


def test_map_face_postconditions_randomized():
    rng = random.Random(20240917)
    for _ in range(2000):
        d = rng.randint(1, 4)
        g = _random_cube_map(rng, d)
        faces = list(all_faces(d))
        face = faces[rng.randrange(len(faces))]
        image = map_face(g, face)
        assert image == face or image.face_dim >= face.face_dim + 1
        # g(F) ⊆ F': check every corner of F
        free = face.free_coordinates()
        for bits in itertools.product((0, 1), repeat=len(free)):
            corner = list(face.barycenter())
            for i, b in zip(free, bits):
                corner[i] = F(b)
            assert image.contains_point(g(corner))
