"""JSON document formats for complexes, barcodes, and periodic windows.

Rationals are serialized as exact strings ("3/2", "-1", "inf") so the
files never touch floating point; scalar coefficients are lists of
exponent literals, one per term of the mod-2 sum.  Parsing reports the
offending field on format errors, and semantic checks are delegated to
the validating constructors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .complexes import Bar, Barcode, FilteredComplex
from .errors import FormatError
from .persistence import PeriodicBarcode
from .scalars import (
    INFINITY,
    NovikovScalar,
    as_exponent,
    format_exponent,
    format_scalar,
    parse_scalar,
)
from .spaces import FilteredMap, FilteredSpace


@dataclass
class ComplexDocument:
    """Parsed complex plus any named auxiliary matrices."""

    complex: FilteredComplex
    maps: dict[str, FilteredMap] = field(default_factory=dict)
    precision: Optional[Fraction] = None

    def map_named(self, name: str) -> FilteredMap:
        if name not in self.maps:
            raise FormatError(
                f"no map named {name!r}; available: {sorted(self.maps)}"
            )
        return self.maps[name]


def _exponent_field(data: dict, key: str, where: str, default=None):
    if key not in data:
        if default is not None:
            return default
        raise FormatError(f"{where}: missing field {key!r}")
    try:
        return as_exponent(data[key])
    except FormatError as exc:
        raise FormatError(f"{where}.{key}: {exc}") from exc


def _parse_entries(
    entries, space: FilteredSpace, precision, where: str
) -> FilteredMap:
    index = {name: k for k, name in enumerate(space.generators)}
    zero = NovikovScalar.zero() if precision is None else NovikovScalar.zero().truncate(precision)
    rows = [[zero for _ in range(space.dim)] for _ in range(space.dim)]
    seen = set()
    if not isinstance(entries, list):
        raise FormatError(f"{where}: expected a list of entries")
    for pos, entry in enumerate(entries):
        spot = f"{where}[{pos}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{spot}: expected an object")
        for key in ("from", "to", "coeff"):
            if key not in entry:
                raise FormatError(f"{spot}: missing field {key!r}")
        src, dst = entry["from"], entry["to"]
        if src not in index:
            raise FormatError(f"{spot}.from: unknown generator {src!r}")
        if dst not in index:
            raise FormatError(f"{spot}.to: unknown generator {dst!r}")
        if (src, dst) in seen:
            raise FormatError(f"{spot}: duplicate entry {src!r} -> {dst!r}")
        seen.add((src, dst))
        coeff = entry["coeff"]
        if not isinstance(coeff, list):
            raise FormatError(f"{spot}.coeff: expected a list of exponent literals")
        try:
            scalar = NovikovScalar.of(
                *coeff, precision=precision if precision is not None else INFINITY
            )
        except FormatError as exc:
            raise FormatError(f"{spot}.coeff: {exc}") from exc
        rows[index[dst]][index[src]] = scalar
    return FilteredMap(space, space, tuple(tuple(r) for r in rows))


def parse_complex_document(data: dict) -> ComplexDocument:
    if not isinstance(data, dict):
        raise FormatError("document root must be an object")
    if "generators" not in data:
        raise FormatError("document: missing field 'generators'")
    precision = None
    if "precision" in data and data["precision"] is not None:
        p = _exponent_field(data, "precision", "document")
        if p != INFINITY:
            precision = Fraction(p)
    names, filts, degrees = [], [], []
    gens = data["generators"]
    if not isinstance(gens, list):
        raise FormatError("document.generators: expected a list")
    for pos, gen in enumerate(gens):
        spot = f"generators[{pos}]"
        if not isinstance(gen, dict) or "name" not in gen:
            raise FormatError(f"{spot}: expected an object with a 'name'")
        name = gen["name"]
        if name in names:
            raise FormatError(f"{spot}: duplicate generator name {name!r}")
        names.append(name)
        filts.append(Fraction(_exponent_field(gen, "filtration", spot)))
        degrees.append(gen.get("degree"))
    if any(d is not None for d in degrees):
        if any(d is None for d in degrees):
            raise FormatError("generators: either all or none carry a degree")
        if not all(isinstance(d, int) for d in degrees):
            raise FormatError("generators: degrees must be integers")
        space = FilteredSpace(tuple(names), tuple(filts), tuple(degrees))
    else:
        space = FilteredSpace(tuple(names), tuple(filts), None)
    differential = _parse_entries(
        data.get("differential", []), space, precision, "differential"
    )
    maps = {}
    raw_maps = data.get("maps", {})
    if not isinstance(raw_maps, dict):
        raise FormatError("document.maps: expected an object of named matrices")
    for name, entries in sorted(raw_maps.items()):
        maps[name] = _parse_entries(entries, space, precision, f"maps.{name}")
    return ComplexDocument(FilteredComplex(space, differential), maps, precision)


def load_complex(path: str) -> ComplexDocument:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    return parse_complex_document(data)


def _entries_of(map_: FilteredMap) -> list:
    entries = []
    gens = map_.source.generators
    for j, src in enumerate(gens):
        for i, dst in enumerate(gens):
            x = map_.matrix[i][j]
            if not x.is_zero():
                entries.append(
                    {
                        "from": src,
                        "to": dst,
                        "coeff": [format_exponent(e) for e in sorted(x.terms)],
                    }
                )
    return entries


def complex_to_document(
    complex_: FilteredComplex,
    maps: Optional[dict[str, FilteredMap]] = None,
    precision: Optional[Fraction] = None,
) -> dict:
    gens = []
    for k, name in enumerate(complex_.space.generators):
        gen = {"name": name, "filtration": format_exponent(complex_.space.filtration[k])}
        if complex_.space.degrees is not None:
            gen["degree"] = complex_.space.degrees[k]
        gens.append(gen)
    doc = {
        "generators": gens,
        "differential": _entries_of(complex_.differential),
    }
    if precision is not None:
        doc["precision"] = format_exponent(precision)
    if maps:
        doc["maps"] = {name: _entries_of(m) for name, m in sorted(maps.items())}
    return doc


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Barcode documents.


def parse_barcode_document(data: dict) -> Barcode:
    if not isinstance(data, dict) or "bars" not in data:
        raise FormatError("barcode document needs a 'bars' list")
    if not isinstance(data["bars"], list):
        raise FormatError("barcode.bars: expected a list")
    bars = []
    for pos, raw in enumerate(data["bars"]):
        spot = f"bars[{pos}]"
        if not isinstance(raw, dict):
            raise FormatError(f"{spot}: expected an object")
        birth = Fraction(_exponent_field(raw, "birth", spot))
        length = _exponent_field(raw, "length", spot)
        mult = raw.get("multiplicity", 1)
        if not isinstance(mult, int) or mult < 1:
            raise FormatError(f"{spot}.multiplicity: must be a positive integer")
        degree = raw.get("degree")
        if degree is not None and not isinstance(degree, int):
            raise FormatError(f"{spot}.degree: must be an integer")
        if length != INFINITY:
            length = Fraction(length)
            if length <= 0:
                raise FormatError(f"{spot}.length: must be positive")
        bars.append(Bar(birth, length, mult, degree))
    return Barcode.build(bars) if bars else Barcode(())


def load_barcode(path: str) -> Barcode:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    return parse_barcode_document(data)


def barcode_to_document(barcode: Barcode) -> dict:
    bars = []
    for bar in barcode:
        item = {
            "birth": format_exponent(bar.birth),
            "length": format_exponent(bar.length),
            "multiplicity": bar.multiplicity,
        }
        if bar.degree is not None:
            item["degree"] = bar.degree
        bars.append(item)
    return {"bars": bars}


# ---------------------------------------------------------------------------
# Periodic windows.


def parse_periodic_document(data: dict) -> PeriodicBarcode:
    if not isinstance(data, dict):
        raise FormatError("periodic document root must be an object")
    for key in ("kappa", "window"):
        if key not in data:
            raise FormatError(f"periodic document: missing field {key!r}")
    kappa = Fraction(_exponent_field(data, "kappa", "document"))
    if not isinstance(data["window"], list) or not data["window"]:
        raise FormatError("periodic.window: expected a non-empty list")
    window = tuple(parse_barcode_document(item) for item in data["window"])
    return PeriodicBarcode(window, kappa)


def load_periodic(path: str) -> PeriodicBarcode:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    return parse_periodic_document(data)


def periodic_to_document(periodic: PeriodicBarcode) -> dict:
    return {
        "kappa": format_exponent(periodic.kappa),
        "window": [barcode_to_document(code) for code in periodic.window],
    }


__all__ = [
    "ComplexDocument",
    "parse_complex_document",
    "load_complex",
    "complex_to_document",
    "parse_barcode_document",
    "load_barcode",
    "barcode_to_document",
    "parse_periodic_document",
    "load_periodic",
    "periodic_to_document",
    "dump_json",
    "format_scalar",
    "parse_scalar",
]
