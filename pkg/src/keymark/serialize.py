"""Versioned scheme documents: JSON round-trip and CSV export.

The document is a plain dict (JSON-ready).  Masses serialize through
mass_to_string, so the canonical form is an exact decimal when the
denominator allows one and "p/q" otherwise.  The key marginal pz is not
stored; it is recomputed on load from the row sums of the m=1 table, which
the scheme invariants define it to be.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .core import (
    ExplicitKeySet,
    JointTable,
    KeySet,
    ReducedKeySet,
    TokenDistribution,
    WatermarkScheme,
)
from .errors import ValidationError
from .rationals import mass_to_string, parse_mass

__all__ = [
    "DOCUMENT_VERSION",
    "serialize_scheme",
    "deserialize_scheme",
    "save_scheme",
    "load_scheme",
    "export_csv",
]

DOCUMENT_VERSION = 1


def serialize_scheme(scheme: WatermarkScheme) -> dict[str, Any]:
    keyset_doc: dict[str, Any] = {
        "kind": scheme.keyset.kind,
        "length": scheme.keyset.length,
        "t": scheme.keyset.t,
    }
    if not isinstance(scheme.keyset, ReducedKeySet):
        keyset_doc["keys"] = [list(k) for k in scheme.keyset]
    tables: dict[str, list[list[Any]]] = {}
    for table in scheme.tables:
        tables[str(table.m)] = [
            [key_index, token, mass_to_string(mass)]
            for key_index, token, mass in table.cells()
        ]
    return {
        "version": DOCUMENT_VERSION,
        "n": scheme.n,
        "t": scheme.t,
        "alpha": mass_to_string(scheme.alpha),
        "px": [mass_to_string(p) for p in scheme.px.probs],
        "keyset": keyset_doc,
        "tables": tables,
        "provenance": dict(scheme.provenance),
    }


def _require(doc: Mapping[str, Any], field: str, where: str) -> Any:
    if field not in doc:
        raise ValidationError(f"{where}: missing field {field!r}")
    return doc[field]


def _parse_keyset(doc: Mapping[str, Any]) -> KeySet:
    kind = _require(doc, "kind", "keyset")
    length = _require(doc, "length", "keyset")
    t = _require(doc, "t", "keyset")
    if not (isinstance(length, int) and isinstance(t, int)):
        raise ValidationError("keyset: length and t must be integers")
    if kind == "reduced":
        return ReducedKeySet(length, t)
    if kind in ("bijective", "explicit-list"):
        keys = _require(doc, "keys", "keyset")
        return ExplicitKeySet(keys, t, kind=kind)
    raise ValidationError(f"keyset: unknown kind {kind!r}")


def deserialize_scheme(doc: Mapping[str, Any]) -> WatermarkScheme:
    version = _require(doc, "version", "document")
    if version != DOCUMENT_VERSION:
        raise ValidationError(f"document: unsupported version {version!r}")
    n = _require(doc, "n", "document")
    t = _require(doc, "t", "document")
    alpha = parse_mass(_require(doc, "alpha", "document"))
    px_texts = _require(doc, "px", "document")
    if len(px_texts) != n:
        raise ValidationError(f"document: px has {len(px_texts)} entries, n={n}")
    px = TokenDistribution.from_strings(px_texts)
    keyset = _parse_keyset(_require(doc, "keyset", "document"))
    tables_doc = _require(doc, "tables", "document")
    tables: list[JointTable] = []
    for m in range(1, t + 1):
        cells = tables_doc.get(str(m))
        if cells is None:
            raise ValidationError(f"tables: missing table for m={m}")
        rows: dict[int, dict[int, Fraction]] = {}
        for position, cell in enumerate(cells):
            where = f"tables.{m}[{position}]"
            if len(cell) != 3:
                raise ValidationError(f"{where}: expected [key_index, token, mass]")
            key_index, token, mass_text = cell
            if not (isinstance(key_index, int) and isinstance(token, int)):
                raise ValidationError(f"{where}: indices must be integers")
            if not 0 <= key_index < len(keyset):
                raise ValidationError(f"{where}: key index {key_index} out of range")
            if not 1 <= token <= n:
                raise ValidationError(f"{where}: token {token} outside [1:{n}]")
            mass = parse_mass(mass_text)
            if mass <= 0:
                raise ValidationError(f"{where}: mass {mass_text!r} is not positive")
            row = rows.setdefault(key_index, {})
            if token in row:
                raise ValidationError(f"{where}: duplicate cell for token {token}")
            row[token] = mass
        tables.append(JointTable(m, rows))
    provenance = doc.get("provenance", {})
    return WatermarkScheme.assemble(alpha, px, keyset, tables, provenance=provenance)


def save_scheme(scheme: WatermarkScheme, path: str | Path) -> None:
    Path(path).write_text(json.dumps(serialize_scheme(scheme), indent=2) + "\n")


def load_scheme(path: str | Path) -> WatermarkScheme:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: document must be a JSON object")
    return deserialize_scheme(doc)


def export_csv(scheme: WatermarkScheme) -> str:
    """One row per stored (m, key, token, mass) cell, after a parameter block."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["# n", scheme.n])
    writer.writerow(["# t", scheme.t])
    writer.writerow(["# alpha", mass_to_string(scheme.alpha)])
    writer.writerow(["m", "key_index", "key", "token", "mass"])
    for table in scheme.tables:
        for key_index, token, mass in table.cells():
            key = scheme.keyset.key(key_index)
            writer.writerow(
                [table.m, key_index, " ".join(map(str, key)), token, mass_to_string(mass)]
            )
    return out.getvalue()
