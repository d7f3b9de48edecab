"""The on-disk document format for sponge and planar-IFS descriptions.

Documents are JSON with exact rationals as "p/q" strings.  Parsing is
strict: unknown fields are rejected, and syntax errors surface with their
line and column.  A document emitted by ``dump_document`` re-parses to an
equal value.

Sponge documents::

    {
      "kind": "sponge",                # optional, the default
      "name": "island-spur",
      "dimension": 2,
      "bases": [[{"ratio": "1/8", "offset": "0"}, ...], ...],
      "digits": [[0, 0], [1, 0], ...],
      "roles": {                       # optional two-vertex edge roles
        "attached_to_free": [[0, 1]],
        "free_to_free": [[7, 0]],
        "free_to_attached": [...],     # optional, default: complement
        "attached_to_attached": [...]  # optional, default: complement
      },
      "sofic": {                       # optional per-row edge matrices
        "columns": 8,
        "row_matrices": [[[8, 7], [0, 1]], ...],
        "adjacency": [[17, 14], [3, 5]]   # optional cross-check
      }
    }

Planar documents::

    {
      "kind": "planar-ifs",
      "name": "trapezoid",
      "maps": [{"ratio": "2/3", "shift": ["0", "0"]}, ...],
      "hull": [["0", "0"], ...],
      "segment": [["1", "1/2"], ["1", "1"]],
      "anchor": [0, 1, 2, 3],
      "bridge": [4, 5],
      "isolated": [6],
      "bridge_witness": {"4": 3, "5": 0}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from spongeslice.core import BaseIFS, SpecError, SpongeSpec, validate_spec
from spongeslice.dimensions import SoficSystem
from spongeslice.graphdir import ComponentSystem, build_graph_ifs
from spongeslice.planar import PlanarMap, PlanarSimilarIFS


class SpecFileError(SpecError):
    """A document failed to parse or violated the schema."""


def _require_keys(mapping: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise SpecFileError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    missing = required - set(mapping)
    if missing:
        raise SpecFileError(f"{where}: missing field {sorted(missing)[0]!r}")


def _fraction(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise SpecFileError(f"{where}: rationals are written as strings, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecFileError(f"{where}: {exc}") from None


def _digit_list(raw, where: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(raw, list):
        raise SpecFileError(f"{where}: expected a list of digit tuples")
    out = []
    for item in raw:
        if not isinstance(item, list) or not all(isinstance(v, int) for v in item):
            raise SpecFileError(f"{where}: digit {item!r} is not a list of integers")
        out.append(tuple(item))
    return tuple(out)


@dataclass(frozen=True)
class SpongeDocument:
    spec: SpongeSpec
    roles: ComponentSystem | None
    sofic: SoficSystem | None
    adjacency_note: str = ""


@dataclass(frozen=True)
class PlanarDocument:
    ifs: PlanarSimilarIFS


def loads_document(text: str) -> SpongeDocument | PlanarDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise SpecFileError("document root must be an object")
    kind = raw.get("kind", "sponge")
    if kind == "sponge":
        return _parse_sponge(raw)
    if kind == "planar-ifs":
        return _parse_planar(raw)
    raise SpecFileError(f"unknown document kind {kind!r}")


def load_document(path) -> SpongeDocument | PlanarDocument:
    return loads_document(Path(path).read_text())


def _parse_sponge(raw: dict) -> SpongeDocument:
    _require_keys(
        raw,
        {"kind", "name", "dimension", "bases", "digits", "roles", "sofic"},
        {"dimension", "bases", "digits"},
        "document",
    )
    dimension = raw["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise SpecFileError("dimension must be a positive integer")
    bases_raw = raw["bases"]
    if not isinstance(bases_raw, list) or len(bases_raw) != dimension:
        raise SpecFileError(f"expected {dimension} base families")
    bases = []
    for i, family in enumerate(bases_raw):
        where = f"bases[{i}]"
        if not isinstance(family, list):
            raise SpecFileError(f"{where}: expected a list of maps")
        ratios, offsets = [], []
        for j, entry in enumerate(family):
            _require_keys(entry, {"ratio", "offset"}, {"ratio", "offset"}, f"{where}[{j}]")
            ratios.append(_fraction(entry["ratio"], f"{where}[{j}].ratio"))
            offsets.append(_fraction(entry["offset"], f"{where}[{j}].offset"))
        bases.append((tuple(ratios), tuple(offsets)))
    digits = _digit_list(raw["digits"], "digits")
    name = raw.get("name", "")
    if not isinstance(name, str):
        raise SpecFileError("name must be a string")
    spec = validate_spec(bases, digits, name)

    roles = None
    if "roles" in raw:
        allowed = {
            "attached_to_free",
            "free_to_free",
            "free_to_attached",
            "attached_to_attached",
        }
        _require_keys(raw["roles"], allowed, {"attached_to_free", "free_to_free"}, "roles")
        kwargs = {
            key: _digit_list(value, f"roles.{key}")
            for key, value in raw["roles"].items()
        }
        roles = ComponentSystem.create(spec, **kwargs)

    sofic = None
    note = ""
    if "sofic" in raw:
        _require_keys(
            raw["sofic"],
            {"columns", "row_matrices", "adjacency"},
            {"columns", "row_matrices"},
            "sofic",
        )
        sofic = SoficSystem.create(
            raw["sofic"]["row_matrices"],
            raw["sofic"]["columns"],
            expected_adjacency=raw["sofic"].get("adjacency"),
        )
    if roles is not None and sofic is not None:
        recomputed = build_graph_ifs(roles).adjacency_matrix()
        if recomputed != sofic.adjacency:
            note = (
                f"role-derived adjacency {recomputed} differs from the sofic "
                f"block's {sofic.adjacency}"
            )
    return SpongeDocument(spec, roles, sofic, note)


def _parse_planar(raw: dict) -> PlanarDocument:
    _require_keys(
        raw,
        {
            "kind",
            "name",
            "maps",
            "hull",
            "segment",
            "anchor",
            "bridge",
            "isolated",
            "bridge_witness",
        },
        {"maps", "hull", "segment", "anchor", "bridge", "isolated", "bridge_witness"},
        "document",
    )

    def point(value, where):
        if not isinstance(value, list) or len(value) != 2:
            raise SpecFileError(f"{where}: expected [x, y]")
        return (_fraction(value[0], where), _fraction(value[1], where))

    maps = []
    for i, entry in enumerate(raw["maps"]):
        _require_keys(entry, {"ratio", "shift"}, {"ratio", "shift"}, f"maps[{i}]")
        maps.append(
            PlanarMap(
                _fraction(entry["ratio"], f"maps[{i}].ratio"),
                point(entry["shift"], f"maps[{i}].shift"),
            )
        )
    hull = tuple(point(p, f"hull[{i}]") for i, p in enumerate(raw["hull"]))
    if len(raw["segment"]) != 2:
        raise SpecFileError("segment: expected two endpoints")
    segment = (
        point(raw["segment"][0], "segment[0]"),
        point(raw["segment"][1], "segment[1]"),
    )

    def indices(key):
        value = raw[key]
        if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
            raise SpecFileError(f"{key}: expected a list of map indices")
        return tuple(value)

    witness_raw = raw["bridge_witness"]
    if not isinstance(witness_raw, dict):
        raise SpecFileError("bridge_witness: expected an object")
    witness = {}
    for key, value in witness_raw.items():
        try:
            witness[int(key)] = int(value)
        except (TypeError, ValueError):
            raise SpecFileError(f"bridge_witness: bad entry {key!r}: {value!r}") from None
    name = raw.get("name", "")
    ifs = PlanarSimilarIFS(
        tuple(maps),
        hull,
        segment,
        indices("anchor"),
        indices("bridge"),
        indices("isolated"),
        witness,
        name,
    )
    return PlanarDocument(ifs)


def dump_document(document: SpongeDocument | PlanarDocument) -> str:
    """Serialize back to the JSON grammar (stable field order)."""
    if isinstance(document, SpongeDocument):
        spec = document.spec
        raw: dict = {
            "kind": "sponge",
            "name": spec.name,
            "dimension": spec.dimension,
            "bases": [
                [
                    {"ratio": str(r), "offset": str(b)}
                    for r, b in zip(base.ratios, base.offsets)
                ]
                for base in spec.bases
            ],
            "digits": [list(d) for d in spec.digits],
        }
        if document.roles is not None:
            raw["roles"] = {
                key: [list(d) for d in value]
                for key, value in document.roles.roles().items()
            }
        if document.sofic is not None:
            raw["sofic"] = {
                "columns": document.sofic.columns,
                "row_matrices": [
                    [list(row) for row in matrix]
                    for matrix in document.sofic.row_matrices
                ],
                "adjacency": [list(row) for row in document.sofic.adjacency],
            }
        return json.dumps(raw, indent=2) + "\n"
    ifs = document.ifs
    raw = {
        "kind": "planar-ifs",
        "name": ifs.name,
        "maps": [
            {"ratio": str(m.ratio), "shift": [str(m.shift[0]), str(m.shift[1])]}
            for m in ifs.maps
        ],
        "hull": [[str(x), str(y)] for x, y in ifs.hull],
        "segment": [[str(x), str(y)] for x, y in ifs.segment],
        "anchor": list(ifs.anchor_class),
        "bridge": list(ifs.bridge_class),
        "isolated": list(ifs.isolated_class),
        "bridge_witness": {str(k): v for k, v in sorted(ifs.bridge_witness.items())},
    }
    return json.dumps(raw, indent=2) + "\n"
