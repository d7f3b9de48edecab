"""Dimension and connectedness-index computations for grid carpets.

Closed forms are evaluated with 120 working bits through mpmath and reported
to 12 significant digits.  The graph-directed Hausdorff value has no closed
form; it is the limit of normalized sums of matrix-product norms, estimated
by dynamic programming over distinct products (with multiplicities) followed
by a Richardson step in 1/k and Aitken acceleration.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath

from spongeslice.core import SpecError, SpongeSpec
from spongeslice.topology import build_approximation, connected_part_cover

WORKING_PRECISION = 120
Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class GridCarpet:
    """An equal-ratio carpet on an n-columns by m-rows grid.

    Orientation is normalized so that columns >= rows; transposed inputs are
    flipped on ingestion (the dimensions are symmetric under transposition
    of the digit set together with the grid).
    """

    columns: int
    rows: int
    digits: tuple[tuple[int, int], ...]
    transposed: bool = False

    def __post_init__(self):
        digits = tuple(sorted({(int(x), int(y)) for x, y in self.digits}))
        object.__setattr__(self, "digits", digits)
        if self.columns < 2 or self.rows < 2:
            raise SpecError("grid carpets need at least 2 branches per axis")
        if not digits:
            raise SpecError("empty digit set")
        for x, y in digits:
            if not (0 <= x < self.columns and 0 <= y < self.rows):
                raise SpecError(f"digit {(x, y)} outside the grid")

    @classmethod
    def create(cls, columns: int, rows: int, digits) -> "GridCarpet":
        if rows > columns:
            digits = tuple((y, x) for x, y in digits)
            return cls(rows, columns, digits, transposed=True)
        return cls(columns, rows, tuple(tuple(d) for d in digits))

    @classmethod
    def from_spec(cls, spec: SpongeSpec) -> "GridCarpet":
        if spec.dimension != 2 or not spec.is_grid:
            raise SpecError("expected a 2-dimensional equal-ratio spec")
        return cls.create(spec.bases[0].count, spec.bases[1].count, spec.digits)

    @property
    def size(self) -> int:
        return len(self.digits)

    def row_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for _, y in self.digits:
            counts[y] = counts.get(y, 0) + 1
        return counts

    @property
    def occupied_rows(self) -> int:
        return len(self.row_counts())


def hausdorff_dimension(carpet: GridCarpet) -> float:
    """log_m of the sum over occupied rows of t_j^(log m / log n)."""
    with mpmath.workprec(WORKING_PRECISION):
        n, m = carpet.columns, carpet.rows
        theta = mpmath.log(m) / mpmath.log(n)
        total = mpmath.fsum(
            mpmath.power(t, theta) for t in carpet.row_counts().values()
        )
        return float(mpmath.log(total) / mpmath.log(m))


def box_dimension(carpet: GridCarpet) -> float:
    """log_m s + log_n (N/s) for s occupied rows and N digits."""
    with mpmath.workprec(WORKING_PRECISION):
        n, m = carpet.columns, carpet.rows
        s, N = carpet.occupied_rows, carpet.size
        return float(
            mpmath.log(s) / mpmath.log(m)
            + (mpmath.log(N) - mpmath.log(s)) / mpmath.log(n)
        )


def _validate_matrix(matrix) -> Matrix:
    rows = tuple(tuple(int(v) for v in row) for row in matrix)
    if not rows or any(len(row) != len(rows) for row in rows):
        raise SpecError("matrix must be square and nonempty")
    if any(v < 0 for row in rows for v in row):
        raise SpecError("matrix entries must be nonnegative")
    return rows


@dataclass(frozen=True)
class QuadraticForm:
    """Exact data of the dominant eigenvalue of a 2x2 integer matrix."""

    trace: int
    determinant: int
    value: float

    @classmethod
    def of(cls, matrix: Matrix) -> "QuadraticForm":
        (a, b), (c, d) = matrix
        trace, det = a + d, a * d - b * c
        with mpmath.workprec(WORKING_PRECISION):
            disc = mpmath.sqrt(trace * trace - 4 * det)
            value = float((trace + disc) / 2)
        return cls(trace, det, value)


@dataclass(frozen=True)
class SpectralRadius:
    value: float
    lower: float
    upper: float
    iterations: int
    closed_form: QuadraticForm | None = None

    @property
    def error(self) -> float:
        return (self.upper - self.lower) / 2


def spectral_radius(
    matrix, tolerance: float = 1e-12, max_iterations: int = 50_000
) -> SpectralRadius:
    """Certified enclosure of the dominant eigenvalue of a nonnegative matrix.

    Power iteration on A+I keeps the iterate strictly positive, and for any
    positive vector x the ratios (Ax)_i / x_i bracket the spectral radius
    from both sides.  The enclosure can stay wide for reducible matrices;
    the bounds remain valid either way.
    """
    A = _validate_matrix(matrix)
    size = len(A)
    closed = QuadraticForm.of(A) if size == 2 else None
    x = [1.0] * size
    lower, upper = 0.0, math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        ax = [sum(A[i][j] * x[j] for j in range(size)) for i in range(size)]
        ratios = [ax[i] / x[i] for i in range(size)]
        lower = max(lower, min(ratios))
        upper = min(upper, max(ratios))
        if upper - lower <= tolerance * max(1.0, upper):
            break
        x = [ax[i] + x[i] for i in range(size)]
        peak = max(x)
        # the ratio bounds are valid for any strictly positive vector, so a
        # floor against underflow keeps them honest (merely wider)
        x = [max(v / peak, 1e-250) for v in x]
    value = closed.value if closed is not None else (lower + upper) / 2
    return SpectralRadius(value, lower, upper, iterations, closed)


@dataclass(frozen=True)
class SoficSystem:
    """Per-row edge-count matrices of a graph-directed carpet system.

    ``row_matrices[j]`` counts, for grid row j, the edges between the two
    (or more) vertices; their elementwise sum is the total adjacency matrix.
    Ingestion rejects systems whose claimed adjacency disagrees with the
    row sum.
    """

    row_matrices: tuple[Matrix, ...]
    columns: int

    def __post_init__(self):
        rows = tuple(_validate_matrix(m) for m in self.row_matrices)
        object.__setattr__(self, "row_matrices", rows)
        if len(rows) < 2:
            raise SpecError("need at least two grid rows")
        size = len(rows[0])
        if any(len(m) != size for m in rows):
            raise SpecError("row matrices must share one size")
        if self.columns < 2:
            raise SpecError("need at least two grid columns")

    @classmethod
    def create(cls, row_matrices, columns, expected_adjacency=None) -> "SoficSystem":
        system = cls(tuple(_validate_matrix(m) for m in row_matrices), columns)
        if expected_adjacency is not None:
            expected = _validate_matrix(expected_adjacency)
            if system.adjacency != expected:
                raise SpecError(
                    "row matrices sum to "
                    f"{system.adjacency}, not the claimed {expected}"
                )
        return system

    @property
    def rows(self) -> int:
        return len(self.row_matrices)

    @property
    def adjacency(self) -> Matrix:
        size = len(self.row_matrices[0])
        return tuple(
            tuple(sum(m[i][j] for m in self.row_matrices) for j in range(size))
            for i in range(size)
        )

    @property
    def contraction_exponent(self) -> float:
        """log(columns)/log(rows), the anisotropy exponent of the grid."""
        with mpmath.workprec(WORKING_PRECISION):
            return float(mpmath.log(self.columns) / mpmath.log(self.rows))


def sofic_box_dimension(system: SoficSystem, occupied_rows: int) -> float:
    """log lam / log n + (1/log m - 1/log n) log s."""
    if occupied_rows <= 0:
        raise SpecError("occupied row count must be positive")
    radius = spectral_radius(system.adjacency)
    with mpmath.workprec(WORKING_PRECISION):
        n, m, s = system.columns, system.rows, occupied_rows
        if radius.closed_form is not None:
            q = radius.closed_form
            lam = (q.trace + mpmath.sqrt(q.trace**2 - 4 * q.determinant)) / 2
        else:
            lam = mpmath.mpf(radius.value)
        return float(
            mpmath.log(lam) / mpmath.log(n)
            + (1 / mpmath.log(m) - 1 / mpmath.log(n)) * mpmath.log(s)
        )


def _matrix_multiply(a: Matrix, b: Matrix) -> Matrix:
    size = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(size)) for j in range(size))
        for i in range(size)
    )


def _entry_sum(matrix: Matrix) -> int:
    return sum(sum(row) for row in matrix)


def aitken(values: Sequence[float]) -> list[float]:
    """Aitken delta-squared acceleration of a sequence."""
    out = []
    for a, b, c in zip(values, values[1:], values[2:]):
        denom = c - 2 * b + a
        if denom == 0 or not math.isfinite(denom):
            out.append(c)
        else:
            out.append(c - (c - b) ** 2 / denom)
    return out


@dataclass(frozen=True)
class HausdorffEstimate:
    raw: tuple[float, ...]
    increments: tuple[float, ...]
    accelerated: tuple[float, ...]
    value: float
    error: float
    depths: tuple[int, ...]
    table_sizes: tuple[int, ...]


def sofic_hausdorff_estimate(
    system: SoficSystem,
    max_depth: int = 24,
    table_budget: int = 1_000_000,
) -> HausdorffEstimate:
    """Estimate the limit of (1/k) log_m sum ||A_(row_k)...A_(row_1)||^(1/sigma).

    Distinct matrix products are hash-consed with multiplicities, so the
    m^k row sequences are never enumerated.  The norm is the entrywise sum
    (all matrices are nonnegative; norm equivalence leaves the limit
    unchanged).  The raw sequence converges like C/k; the per-step increment
    ``k s_k - (k-1) s_(k-1)`` removes that term and Aitken acceleration is
    applied on top.
    """
    if max_depth < 4:
        raise SpecError("need max_depth >= 4 to extrapolate")
    generators: dict[Matrix, int] = {}
    for m in system.row_matrices:
        generators[m] = generators.get(m, 0) + 1
    inv_sigma = 1.0 / system.contraction_exponent
    log_m = math.log(system.rows)

    table: dict[Matrix, int] = dict(generators)
    raw: list[float] = []
    log_totals: list[float] = []
    sizes: list[int] = []
    depths: list[int] = []
    for depth in range(1, max_depth + 1):
        total = 0.0
        for product, count in table.items():
            total += count * _entry_sum(product) ** inv_sigma
        if total <= 0:
            raw.append(float("-inf"))
            log_totals.append(float("-inf"))
        else:
            log_totals.append(math.log(total))
            raw.append(log_totals[-1] / (depth * log_m))
        sizes.append(len(table))
        depths.append(depth)
        if depth == max_depth:
            break
        grown: dict[Matrix, int] = {}
        for product, count in table.items():
            for generator, weight in generators.items():
                key = _matrix_multiply(generator, product)
                grown[key] = grown.get(key, 0) + count * weight
        if len(grown) > table_budget:
            break
        table = grown

    increments = [
        (b - a) / log_m for a, b in zip(log_totals, log_totals[1:])
    ]
    accelerated = aitken(increments)
    if accelerated:
        value = accelerated[-1]
        prev = accelerated[-2] if len(accelerated) > 1 else increments[-1]
        error = abs(value - prev) + abs(value - increments[-1]) * 0.5
    elif increments:
        value = increments[-1]
        error = abs(increments[-1] - increments[0])
    else:
        value = raw[-1]
        error = float("inf")
    return HausdorffEstimate(
        tuple(raw),
        tuple(increments),
        tuple(accelerated),
        value,
        error,
        tuple(depths),
        tuple(sizes),
    )


@dataclass(frozen=True)
class DimensionValue:
    value: float | None
    method: str
    error: float = 0.0

    def formatted(self) -> str:
        if self.value is None:
            return self.method
        return f"{self.value:.12g}"


@dataclass(frozen=True)
class DimensionReport:
    name: str
    hausdorff: DimensionValue
    box: DimensionValue
    index_hausdorff: DimensionValue
    index_box: DimensionValue


@dataclass(frozen=True)
class DropCheck:
    holds: bool
    hausdorff_margin: float | None
    box_margin: float | None
    reliable: bool
    note: str = ""


def ambient_dimensions(
    spec: SpongeSpec,
    planar_dimensions: Callable[[SpongeSpec], tuple[float, float]] | None = None,
) -> tuple[DimensionValue, DimensionValue]:
    """Hausdorff/box dimension of the sponge itself, where a formula exists.

    Unequal-ratio planar carpets are an extension point: pass a functional
    computing (hausdorff, box) to fill them in.  No formula is wired in for
    three or more dimensions.
    """
    if spec.dimension == 2 and spec.is_grid:
        carpet = GridCarpet.from_spec(spec)
        closed = "closed-form"
        return (
            DimensionValue(hausdorff_dimension(carpet), closed, 1e-12),
            DimensionValue(box_dimension(carpet), closed, 1e-12),
        )
    if spec.dimension == 2 and spec.is_slicing:
        if planar_dimensions is not None:
            h, b = planar_dimensions(spec)
            return (
                DimensionValue(h, "plugin"),
                DimensionValue(b, "plugin"),
            )
        reason = "n/a: unequal-ratio formula not built in (extension point)"
        return DimensionValue(None, reason), DimensionValue(None, reason)
    reason_h = "n/a: open problem in three or more dimensions"
    reason_b = "n/a: no box formula in three or more dimensions"
    return DimensionValue(None, reason_h), DimensionValue(None, reason_b)


def characterize_connected_part(
    spec: SpongeSpec,
    max_depth: int = 3,
    connectivity_check_depth: int = 2,
):
    """Semi-decide what the connected part looks like.

    Returns ("empty", None) when the cover leaves at most one branch,
    ("carpet", GridCarpet) when a first-level island search yields a
    connected sub-carpet, and ("unknown", reason) otherwise.
    """
    search = connected_part_cover(spec, max_depth)
    target = search.reduced_spec or spec
    if search.datum is None:
        return "unknown", f"no island found up to depth {search.searched_depth}"
    datum = search.datum
    if len(datum.sub_words) <= 1:
        return "empty", None
    if datum.depth != 1 or target.dimension != 2 or not target.is_grid:
        return (
            "unknown",
            "cover is only an upper bound here (iterated or non-planar sub-IFS)",
        )
    digits = tuple(w[0] for w in datum.sub_words)
    sub = SpongeSpec(target.bases, digits, f"{target.name}-core")
    for depth in range(1, connectivity_check_depth + 1):
        graph = build_approximation(sub, depth)
        if len(graph.components) != 1:
            return (
                "unknown",
                "sub-IFS approximation disconnects: cover is only an upper bound",
            )
    return "carpet", GridCarpet.from_spec(sub)


def connectedness_indices(
    spec: SpongeSpec,
    part,
    occupied_rows: int | None = None,
    max_depth: int = 24,
    table_budget: int = 1_000_000,
    planar_dimensions: Callable[[SpongeSpec], tuple[float, float]] | None = None,
) -> DimensionReport:
    """Dimensions of the sponge and of its connected part.

    ``part`` characterizes the connected part: a GridCarpet (it *is* that
    carpet), a SoficSystem (it is the graph-directed pair's invariant set;
    ``occupied_rows`` supplies s), or the string "empty".
    """
    dim_h, dim_b = ambient_dimensions(spec, planar_dimensions)
    if isinstance(part, GridCarpet):
        ind_h = DimensionValue(hausdorff_dimension(part), "closed-form", 1e-12)
        ind_b = DimensionValue(box_dimension(part), "closed-form", 1e-12)
    elif isinstance(part, SoficSystem):
        s = occupied_rows if occupied_rows is not None else part.rows
        radius = spectral_radius(part.adjacency)
        ind_b = DimensionValue(
            sofic_box_dimension(part, s), "spectral", max(radius.error, 1e-12)
        )
        estimate = sofic_hausdorff_estimate(part, max_depth, table_budget)
        ind_h = DimensionValue(estimate.value, "limit-extrapolated", estimate.error)
    elif part == "empty":
        ind_h = DimensionValue(None, "connected part empty")
        ind_b = DimensionValue(None, "connected part empty")
    else:
        raise SpecError(f"unsupported connected-part characterization: {part!r}")
    return DimensionReport(spec.name or "sponge", dim_h, dim_b, ind_h, ind_b)


def check_dimension_drop(report: DimensionReport) -> DropCheck:
    """Strict index-below-dimension margins, flagged when inside the noise."""
    pairs = [
        (report.hausdorff, report.index_hausdorff),
        (report.box, report.index_box),
    ]
    if any(v.value is None for pair in pairs for v in pair):
        return DropCheck(False, None, None, False, "missing values")
    h_margin = report.hausdorff.value - report.index_hausdorff.value
    b_margin = report.box.value - report.index_box.value
    holds = h_margin > 0 and b_margin > 0
    noise_h = report.hausdorff.error + report.index_hausdorff.error
    noise_b = report.box.error + report.index_box.error
    reliable = h_margin > noise_h and b_margin > noise_b
    note = "" if holds else "no drop: connected part as large as the sponge"
    return DropCheck(holds, h_margin, b_margin, reliable, note)


def write_report_csv(reports: Sequence[DimensionReport]) -> str:
    """Table rows with 12-significant-digit values and method tags."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        [
            "name",
            "dim_hausdorff",
            "dim_box",
            "ind_hausdorff",
            "ind_box",
            "dim_hausdorff_method",
            "dim_box_method",
            "ind_hausdorff_method",
            "ind_box_method",
            "hausdorff_margin",
            "box_margin",
        ]
    )
    for report in reports:
        drop = check_dimension_drop(report)
        writer.writerow(
            [
                report.name,
                report.hausdorff.formatted(),
                report.box.formatted(),
                report.index_hausdorff.formatted(),
                report.index_box.formatted(),
                report.hausdorff.method,
                report.box.method,
                report.index_hausdorff.method,
                report.index_box.method,
                "n/a" if drop.hausdorff_margin is None else f"{drop.hausdorff_margin:.12g}",
                "n/a" if drop.box_margin is None else f"{drop.box_margin:.12g}",
            ]
        )
    return out.getvalue()
