import itertools
import math
import random

import mpmath
import pytest

from spongeslice import catalog
from spongeslice.core import SpecError
from spongeslice.dimensions import (
    DimensionReport,
    DimensionValue,
    GridCarpet,
    SoficSystem,
    aitken,
    ambient_dimensions,
    box_dimension,
    characterize_connected_part,
    check_dimension_drop,
    connectedness_indices,
    hausdorff_dimension,
    sofic_box_dimension,
    sofic_hausdorff_estimate,
    spectral_radius,
    write_report_csv,
)

mpmath.mp.dps = 40


def full_grid(n, m):
    return GridCarpet(n, m, tuple(itertools.product(range(n), range(m))))


def test_full_grid_dimensions_are_two():
    carpet = full_grid(8, 5)
    assert hausdorff_dimension(carpet) == pytest.approx(2, abs=1e-12)
    assert box_dimension(carpet) == pytest.approx(2, abs=1e-12)


def test_single_digit_dimensions_are_zero():
    carpet = GridCarpet(8, 5, ((3, 2),))
    assert hausdorff_dimension(carpet) == pytest.approx(0, abs=1e-15)
    assert box_dimension(carpet) == pytest.approx(0, abs=1e-15)


def test_spur_carpet_hausdorff_matches_closed_form():
    carpet = GridCarpet.from_spec(catalog.boundary_spur_carpet())
    expected = float(mpmath.log(12 + mpmath.cbrt(5)) / mpmath.log(5))
    assert hausdorff_dimension(carpet) == pytest.approx(expected, abs=1e-12)
    assert hausdorff_dimension(carpet) == pytest.approx(1.627, abs=5e-4)


def test_spur_carpet_box_matches_closed_form():
    carpet = GridCarpet.from_spec(catalog.boundary_spur_carpet())
    expected = float(1 + mpmath.log(4) / mpmath.log(8))
    assert box_dimension(carpet) == pytest.approx(expected, abs=1e-12)


def test_bracket_carpet_closed_forms():
    carpet = GridCarpet.from_spec(catalog.bracket_carpet())
    assert hausdorff_dimension(carpet) == pytest.approx(
        float(mpmath.log(13) / mpmath.log(5)), abs=1e-12
    )
    assert box_dimension(carpet) == pytest.approx(
        float(1 + mpmath.log(mpmath.mpf(19) / 5) / mpmath.log(8)), abs=1e-12
    )
    assert box_dimension(carpet) == pytest.approx(1.640, abs=5e-3)


def test_orientation_normalization():
    tall = GridCarpet.create(5, 8, tuple((y, x) for x, y in full_grid(8, 5).digits))
    assert tall.transposed
    assert tall.columns == 8 and tall.rows == 5
    wide = GridCarpet.from_spec(catalog.boundary_spur_carpet())
    flipped = GridCarpet.create(5, 8, tuple((y, x) for x, y in wide.digits))
    assert hausdorff_dimension(flipped) == hausdorff_dimension(wide)


def test_hausdorff_never_exceeds_box():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(2, 7)
        m = rng.randint(2, n)
        cells = list(itertools.product(range(n), range(m)))
        digits = rng.sample(cells, rng.randint(1, len(cells)))
        carpet = GridCarpet(n, m, tuple(digits))
        h, b = hausdorff_dimension(carpet), box_dimension(carpet)
        assert h <= b + 1e-12
        counts = set(carpet.row_counts().values())
        if len(counts) > 1 and n > m:
            assert h < b - 1e-12


def test_adding_digit_is_monotone():
    rng = random.Random(13)
    for _ in range(40):
        n, m = rng.randint(3, 7), rng.randint(2, 5)
        if m > n:
            n, m = m, n
        cells = list(itertools.product(range(n), range(m)))
        digits = rng.sample(cells, rng.randint(1, len(cells) - 1))
        extra = rng.choice([c for c in cells if c not in digits])
        small = GridCarpet(n, m, tuple(digits))
        large = GridCarpet(n, m, tuple(digits) + (extra,))
        assert hausdorff_dimension(large) >= hausdorff_dimension(small) - 1e-12
        assert box_dimension(large) >= box_dimension(small) - 1e-12


def test_spectral_radius_printed_matrix():
    result = spectral_radius([[17, 14], [3, 5]])
    expected = float((22 + mpmath.sqrt(312)) / 2)
    assert result.value == pytest.approx(expected, abs=1e-9)
    assert result.closed_form.trace == 22
    assert result.closed_form.determinant == 43
    assert result.lower <= expected <= result.upper


def test_spectral_radius_identity_and_scalar():
    assert spectral_radius([[1, 0], [0, 1]]).value == pytest.approx(1, abs=1e-12)
    assert spectral_radius([[20]]).value == pytest.approx(20, abs=1e-12)


def test_spectral_radius_perron_bounds_random():
    rng = random.Random(5)
    for _ in range(100):
        size = rng.randint(1, 5)
        A = [[rng.randint(0, 9) for _ in range(size)] for _ in range(size)]
        result = spectral_radius(A, max_iterations=3000)
        row_sums = [sum(row) for row in A]
        assert result.upper <= max(row_sums) + 1e-9
        assert result.lower >= min(row_sums) - 1e-9


def test_spectral_radius_rejects_negative():
    with pytest.raises(SpecError, match="nonnegative"):
        spectral_radius([[1, -1], [0, 1]])


def test_sofic_system_rejects_mismatched_adjacency():
    rows = catalog.boundary_spur_row_matrices()
    with pytest.raises(SpecError, match="sum to"):
        SoficSystem.create(rows, 8, expected_adjacency=[[17, 15], [3, 5]])


def printed_system():
    return SoficSystem.create(
        catalog.boundary_spur_row_matrices(),
        8,
        expected_adjacency=catalog.boundary_spur_adjacency(),
    )


def test_sofic_box_value():
    value = sofic_box_dimension(printed_system(), 5)
    lam = (22 + mpmath.sqrt(312)) / 2
    closed = float(
        mpmath.log(lam) / mpmath.log(8)
        + (1 / mpmath.log(5) - 1 / mpmath.log(8)) * mpmath.log(5)
    )
    assert value == pytest.approx(closed, abs=1e-9)


def test_sofic_box_single_vertex_reduces_to_carpet_box():
    carpet = GridCarpet.from_spec(catalog.boundary_spur_carpet())
    counts = carpet.row_counts()
    rows = [[[counts.get(j, 0)]] for j in range(5)]
    system = SoficSystem.create(rows, 8)
    assert sofic_box_dimension(system, 5) == pytest.approx(
        box_dimension(carpet), abs=1e-12
    )


def test_sofic_box_degenerate_zero():
    system = SoficSystem.create([[[1]], [[0]]], 2)
    assert sofic_box_dimension(system, 1) == pytest.approx(0, abs=1e-12)


def test_sofic_hausdorff_printed_system():
    estimate = sofic_hausdorff_estimate(printed_system(), max_depth=12)
    assert 1.59 <= estimate.value <= 1.63
    assert estimate.error < 1e-6
    assert max(estimate.table_sizes) < 1_000_000


def test_sofic_hausdorff_single_vertex_factorizes():
    rng = random.Random(3)
    for _ in range(5):
        m = rng.randint(2, 5)
        n = rng.randint(m, 9)
        counts = [rng.randint(0, n) for _ in range(m)]
        if sum(counts) == 0:
            counts[0] = 1
        system = SoficSystem.create([[[t]] for t in counts], n)
        digits = []
        for j, t in enumerate(counts):
            digits += [(x, j) for x in range(t)]
        carpet = GridCarpet(n, m, tuple(digits)) if digits else None
        expected = hausdorff_dimension(carpet)
        estimate = sofic_hausdorff_estimate(system, max_depth=10)
        for s_k in estimate.raw:
            assert s_k == pytest.approx(expected, abs=1e-9)


def test_sofic_hausdorff_trivial_single_one():
    system = SoficSystem.create([[[1]], [[0]]], 2)
    estimate = sofic_hausdorff_estimate(system, max_depth=6)
    assert estimate.value == pytest.approx(0, abs=1e-12)


def test_sofic_hausdorff_raw_sequence_monotone_tail():
    estimate = sofic_hausdorff_estimate(printed_system(), max_depth=12)
    tail = estimate.raw[3:]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    lo, hi = sorted((estimate.raw[-1], estimate.increments[-1]))
    assert lo - 1e-9 <= estimate.value <= hi + 1e-9


def test_aitken_accelerates_geometric():
    seq = [1 + 0.5**k for k in range(1, 10)]
    assert aitken(seq)[-1] == pytest.approx(1, abs=1e-12)


def test_connectedness_indices_sofic_route():
    spec = catalog.boundary_spur_carpet()
    report = connectedness_indices(spec, printed_system(), occupied_rows=5, max_depth=12)
    assert report.index_box.method == "spectral"
    assert report.index_hausdorff.method == "limit-extrapolated"
    assert report.index_box.value == pytest.approx(1.6626042601526871, abs=1e-9)
    assert 1.59 <= report.index_hausdorff.value <= 1.63
    drop = check_dimension_drop(report)
    assert drop.holds and drop.reliable


def test_connectedness_indices_carpet_route():
    spec = catalog.island_spur_carpet()
    kind, carpet = characterize_connected_part(spec)
    assert kind == "carpet"
    report = connectedness_indices(spec, carpet)
    assert report.index_hausdorff.value == pytest.approx(
        float(mpmath.log(13) / mpmath.log(5)), abs=1e-12
    )
    drop = check_dimension_drop(report)
    assert drop.holds and drop.reliable
    assert drop.hausdorff_margin > 1e-3
    assert drop.box_margin > 1e-3


def test_connectedness_indices_empty_part():
    spec = catalog.two_cell_dust()
    kind, payload = characterize_connected_part(spec)
    assert kind == "empty"
    report = connectedness_indices(spec, "empty")
    assert report.index_hausdorff.value is None
    assert "empty" in report.index_hausdorff.method
    drop = check_dimension_drop(report)
    assert not drop.holds and drop.note == "missing values"


def test_connected_spec_has_no_drop():
    spec_digits = tuple(itertools.product(range(2), range(2)))
    from spongeslice.core import BaseIFS, SpongeSpec

    spec = SpongeSpec((BaseIFS.uniform(2), BaseIFS.uniform(2)), spec_digits, "full")
    kind, reason = characterize_connected_part(spec)
    assert kind == "unknown"
    carpet = GridCarpet.from_spec(spec)
    report = connectedness_indices(spec, carpet)
    drop = check_dimension_drop(report)
    assert not drop.holds
    assert "no drop" in drop.note


def test_ambient_dimensions_routes():
    h, b = ambient_dimensions(catalog.uneven_carpet())
    assert h.value is None and "extension point" in h.method
    h3, b3 = ambient_dimensions(catalog.sponge_3d())
    assert "open problem" in h3.method
    assert "no box formula" in b3.method
    h2, _ = ambient_dimensions(
        catalog.uneven_carpet(), planar_dimensions=lambda spec: (1.0, 1.5)
    )
    assert h2.value == 1.0 and h2.method == "plugin"


def test_csv_report_layout():
    spec = catalog.island_spur_carpet()
    report = connectedness_indices(spec, characterize_connected_part(spec)[1])
    text = write_report_csv([report])
    lines = text.strip().split("\n")
    assert lines[0].startswith("name,dim_hausdorff,dim_box,ind_hausdorff,ind_box")
    row = lines[1].split(",")
    assert row[0] == "island-spur"
    assert row[1] == f"{hausdorff_dimension(GridCarpet.from_spec(spec)):.12g}"
    assert len(row[1].replace(".", "").lstrip("0")) <= 12
    assert row[5] == "closed-form"
