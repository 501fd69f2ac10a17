"""Serialization of the block-diagonalization data.

A bundle is a directory holding ``manifest.json`` plus one file per table.
Flat tables (index set, types, spectrum, basis columns, change of basis,
structure constants) are written as CSV by default or as JSON with
``fmt="json"``; the nested representation blocks are always JSON.  Every
rational is a string in lowest terms ("p/q", or "p" for an integer), every
table is sorted canonically, and nothing time-dependent is written, so the
bytes depend only on m.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .decomposition import Decomposition
from .linalg import format_rational, parse_rational

FORMAT_VERSION = 1

FLAT_TABLES = {
    "upsilon": ("mu", "d", "block_dim", "multiplicity"),
    "types": ("index", "i", "j", "t", "p"),
    "spectrum": ("k", "theta", "multiplicity"),
    "basis_columns": ("column", "mu", "d", "copy", "sphere", "squared_norm"),
    "change_of_basis": ("row", "column", "value"),
    "structure_constants": ("a", "b", "c", "value"),
}
# Columns holding rationals; all others are plain integers.
RATIONAL_COLUMNS = {"squared_norm", "value"}


class ExportError(OSError):
    """Writing or reading a bundle failed; the message names the path."""


@dataclass
class Bundle:
    """In-memory form of an export bundle.

    ``tables`` maps a flat table name to a list of row tuples; ``blocks`` is
    one ``(type_index, [(mu, d, [(r, c, value), ...]), ...])`` entry per basis
    element.  Equality of two bundles is equality of every field.
    """

    manifest: dict
    tables: dict
    blocks: list


def collect_bundle(alg, dec: Decomposition) -> Bundle:
    """Gather the exported data from an algebra whose decomposition has
    already been through :func:`~otw.decomposition.verify_block_structure`."""
    sd = alg.spectral
    ob = alg.orbit_basis
    m = alg.m
    upsilon = [(mu, d, size, mult) for mu, d, mult, size in dec.report.rows]
    types = [(k, *tt) for k, tt in enumerate(ob.types.types)]
    spectrum = [(k, sd.theta(k), sd.multiplicity(k)) for k in range(m + 1)]
    columns, entries = [], []
    for col, ((mu, d, q, k), vec, nrm) in enumerate(dec.report.change_of_basis):
        columns.append((col, mu, d, q, k, nrm))
        entries.extend((row, col, v) for row, v in enumerate(vec) if v)
    entries.sort()
    structure = [(a, b, c, n) for a, b, row in alg.structure_constants.items()
                 for c, n in row.items()]
    blocks = []
    for idx, tt in enumerate(ob.types.types):
        per = []
        for comp in dec.components:
            mat = comp.representation_blocks.get(tt)
            if mat is None:
                raise ExportError(f"no representation block for {tuple(tt)}; run the block check first")
            per.append((comp.mu, comp.d, list(mat.items())))
        blocks.append((idx, per))
    manifest = {
        "format_version": FORMAT_VERSION,
        "m": m,
        "counts": {
            "vertices": alg.ctx.vertex_count,
            "types": len(ob.types),
            "components": len(dec.components),
            "basis_vectors": len(columns),
            "structure_constants": len(structure),
        },
        "q_ordering": list(sd.q_ordering),
        "eigenvalues": list(sd.ordered_eigenvalues),
        "multiplicities": [sd.multiplicity(k) for k in range(m + 1)],
    }
    tables = {
        "upsilon": upsilon,
        "types": types,
        "spectrum": spectrum,
        "basis_columns": columns,
        "change_of_basis": entries,
        "structure_constants": structure,
    }
    return Bundle(manifest, tables, blocks)


def _encode(name: str, value):
    return format_rational(value) if name in RATIONAL_COLUMNS else int(value)


def _decode(name: str, text):
    return parse_rational(str(text)) if name in RATIONAL_COLUMNS else int(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _table_csv(name: str, rows) -> str:
    header = FLAT_TABLES[name]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_encode(h, v) for h, v in zip(header, row)])
    return buf.getvalue()


def _table_json(name: str, rows) -> str:
    header = FLAT_TABLES[name]
    data = [{h: (_encode(h, v) if h in RATIONAL_COLUMNS else v) for h, v in zip(header, row)}
            for row in rows]
    return _dump_json({"columns": list(header), "rows": data})


def _blocks_json(blocks) -> str:
    data = [
        {
            "type_index": idx,
            "blocks": [
                {"mu": mu, "d": d, "entries": [[r, c, format_rational(v)] for r, c, v in ents]}
                for mu, d, ents in per
            ],
        }
        for idx, per in blocks
    ]
    return _dump_json(data)


def render_bundle(bundle: Bundle, fmt: str = "csv") -> dict[str, str]:
    """File name to text for every file of the bundle."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    files = {}
    for name in FLAT_TABLES:
        rows = bundle.tables[name]
        if fmt == "csv":
            files[f"{name}.csv"] = _table_csv(name, rows)
        else:
            files[f"{name}.json"] = _table_json(name, rows)
    files["blocks.json"] = _blocks_json(bundle.blocks)
    manifest = dict(bundle.manifest, format=fmt, files=sorted(files))
    files["manifest.json"] = _dump_json(manifest)
    return files


def write_bundle(bundle: Bundle, out_dir, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(f"cannot create {out}: {e.strerror or e}") from e
    written = []
    for name, text in sorted(render_bundle(bundle, fmt).items()):
        path = out / name
        try:
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as e:
            raise ExportError(f"cannot write {path}: {e.strerror or e}") from e
        written.append(path)
    return written


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ExportError(f"cannot read {path}: {e.strerror or e}") from e


def read_bundle(out_dir) -> Bundle:
    """Parse a bundle written by :func:`write_bundle` in either format and
    check that its tables agree with the manifest counts."""
    out = Path(out_dir)
    manifest = json.loads(_read(out / "manifest.json"))
    fmt = manifest.pop("format")
    manifest.pop("files")
    tables = {}
    for name, header in FLAT_TABLES.items():
        if fmt == "csv":
            reader = csv.reader(io.StringIO(_read(out / f"{name}.csv")))
            got = next(reader)
            if tuple(got) != header:
                raise ExportError(f"{out / (name + '.csv')}: unexpected header {got}")
            tables[name] = [tuple(_decode(h, v) for h, v in zip(header, row)) for row in reader]
        else:
            data = json.loads(_read(out / f"{name}.json"))
            tables[name] = [tuple(_decode(h, row[h]) for h in header) for row in data["rows"]]
    blocks = [
        (e["type_index"],
         [(b["mu"], b["d"], [(r, c, parse_rational(v)) for r, c, v in b["entries"]])
          for b in e["blocks"]])
        for e in json.loads(_read(out / "blocks.json"))
    ]
    bundle = Bundle(manifest, tables, blocks)
    problems = consistency_problems(bundle)
    if problems:
        raise ExportError(f"{out}: {problems[0]}")
    return bundle


def consistency_problems(bundle: Bundle) -> list[str]:
    counts = bundle.manifest["counts"]
    t = bundle.tables
    out = []
    expect = {
        "types": counts["types"],
        "upsilon": counts["components"],
        "basis_columns": counts["basis_vectors"],
        "structure_constants": counts["structure_constants"],
        "spectrum": bundle.manifest["m"] + 1,
    }
    for name, n in expect.items():
        if len(t[name]) != n:
            out.append(f"{name} has {len(t[name])} rows, manifest says {n}")
    if counts["basis_vectors"] != counts["vertices"]:
        out.append("basis size differs from vertex count")
    if len(bundle.blocks) != counts["types"]:
        out.append(f"{len(bundle.blocks)} block entries for {counts['types']} types")
    if any(len(per) != counts["components"] for _, per in bundle.blocks):
        out.append("a block entry has the wrong number of blocks")
    if sum(r[3] * r[2] for r in t["upsilon"]) != counts["vertices"]:
        out.append("multiplicities do not account for every vertex")
    return out
