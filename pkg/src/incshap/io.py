"""File formats: the instance manifest, FD spec files, and CSV data.

A manifest is a JSON object with three keys: ``schema`` maps relation
names to ordered attribute lists, ``data`` maps relation names to CSV
paths (relative paths resolve against the manifest's directory), and
``fds`` names the FD spec file.  CSV files carry a header row that must
equal the schema's attribute list exactly; rows are loaded in order and
duplicate rows are rejected.  FD files hold one dependency per line:

    Relation: attr attr -> attr attr

with ``_`` for an empty left-hand side, ``#`` comments, and blank lines
ignored.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import LoadError, ParseError
from .relational import FD, Database, Fact, FDSet, Schema


@dataclass(frozen=True)
class Manifest:
    schema: Schema
    data_paths: dict[str, Path]
    fds_path: Path


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"manifest {path} is not valid JSON: {exc}") from None
    for key in ("schema", "data", "fds"):
        if key not in raw:
            raise LoadError(f"manifest {path} is missing the {key!r} key")
    schema = Schema.from_dict(raw["schema"])
    base = path.parent
    data_paths = {}
    for relation, rel_path in raw["data"].items():
        if not schema.has_relation(relation):
            raise LoadError(
                f"manifest data names unknown relation {relation!r}"
            )
        data_paths[relation] = base / rel_path
    return Manifest(schema, data_paths, base / raw["fds"])


def parse_fd_file(text: str, schema: Schema) -> FDSet:
    """Parse the FD spec grammar; duplicates are dropped, order preserved."""
    fds: list[FD] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected 'Relation: lhs -> rhs'", line=lineno)
        relation, _, rest = line.partition(":")
        relation = relation.strip()
        if not schema.has_relation(relation):
            raise ParseError(f"unknown relation {relation!r}", line=lineno)
        if rest.count("->") != 1:
            raise ParseError("expected exactly one '->'", line=lineno)
        left, _, right = rest.partition("->")
        lhs_tokens = left.split()
        rhs_tokens = right.split()
        if lhs_tokens == ["_"]:
            lhs_tokens = []
        elif "_" in lhs_tokens:
            raise ParseError("'_' must stand alone as the left-hand side", line=lineno)
        if not rhs_tokens:
            raise ParseError("empty right-hand side", line=lineno)
        known = set(schema.attributes(relation))
        for token in lhs_tokens + rhs_tokens:
            if token not in known:
                raise ParseError(
                    f"unknown attribute {token!r} in relation {relation!r}",
                    line=lineno,
                )
        fd = FD(relation, frozenset(lhs_tokens), frozenset(rhs_tokens))
        if fd not in fds:
            fds.append(fd)
    return FDSet(schema, tuple(fds))


def _load_relation_csv(relation: str, attrs: tuple[str, ...], path: Path) -> list[Fact]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise LoadError(f"data file not found: {path}") from None
    reader = csv.reader(_io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise LoadError(f"{path}: missing header row")
    if tuple(rows[0]) != attrs:
        raise LoadError(
            f"{path}: header {rows[0]} does not match the schema "
            f"attributes {list(attrs)}"
        )
    facts: list[Fact] = []
    seen: dict[tuple[str, ...], int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(attrs):
            raise LoadError(
                f"{path}: line {lineno} has {len(row)} values, "
                f"expected {len(attrs)}"
            )
        values = tuple(row)
        if values in seen:
            raise LoadError(
                f"{path}: line {lineno} duplicates line {seen[values]}"
            )
        seen[values] = lineno
        facts.append(Fact(relation, values, len(facts)))
    return facts


def load_database(manifest: Manifest) -> Database:
    """Load all relations; fact ids follow CSV row order per relation."""
    facts: list[Fact] = []
    for relation, attrs in manifest.schema.relations:
        path = manifest.data_paths.get(relation)
        if path is not None:
            facts.extend(_load_relation_csv(relation, attrs, path))
    return Database(manifest.schema, tuple(facts))


def load_fds(manifest: Manifest) -> FDSet:
    try:
        text = manifest.fds_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise LoadError(f"FD file not found: {manifest.fds_path}") from None
    return parse_fd_file(text, manifest.schema)


def load_instance(manifest: Manifest) -> tuple[Database, FDSet]:
    return load_database(manifest), load_fds(manifest)


def database_to_csv(db: Database, relation: str) -> str:
    """Serialize one relation back to CSV (round-trips through load)."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(db.schema.attributes(relation))
    for fact in db.facts_of(relation):
        writer.writerow(fact.values)
    return out.getvalue()
