"""Classical data model: fixed-width bit-field records with a distinct key
field, JSON (de)serialization, power-of-two padding, and key encoding.

The file format is normative and bit-exact::

    {"version": 1,
     "fields": [{"name": "id", "bit_width": 4}, ...],
     "key_field": "id",
     "records": [{"id": "0101", "phone": "00110010"}, ...]}

Bit strings are ASCII '0'/'1', most significant bit first; the leftmost
character of the key lands on data qubit offset 0.  Record order defines
the 0-based index.  Padding appends sentinel records with the
lexicographically smallest unused keys; sentinels are flagged in memory so
verification never accepts them as solutions (the flag is not serialized).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .errors import (
    DatabaseFormatError,
    DuplicateKeyError,
    FieldWidthError,
    KeySpaceExhaustedError,
    QueryError,
    UnknownFieldError,
)

FORMAT_VERSION = 1


def _check_bits(value: str, width: int, where: str) -> None:
    if len(value) != width:
        raise FieldWidthError(
            f"{where}: value {value!r} has width {len(value)}, declared {width}"
        )
    if any(ch not in "01" for ch in value):
        raise DatabaseFormatError(f"{where}: value {value!r} is not a bit string")


@dataclass(frozen=True)
class FieldSpec:
    name: str
    bit_width: int

    def __post_init__(self) -> None:
        if self.bit_width < 1:
            raise DatabaseFormatError(f"field {self.name!r}: bit_width must be >= 1")


@dataclass(frozen=True)
class Record:
    values: Mapping[str, str]
    is_sentinel: bool = False


@dataclass(frozen=True)
class Database:
    fields: tuple[FieldSpec, ...]
    records: tuple[Record, ...]
    key_field: str

    def __post_init__(self) -> None:
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise DatabaseFormatError("field names must be unique")
        if self.key_field not in names:
            raise UnknownFieldError(f"unknown key_field {self.key_field!r}")
        if not self.records:
            raise DatabaseFormatError("database needs at least one record")
        widths = {f.name: f.bit_width for f in self.fields}
        seen: set[str] = set()
        for i, rec in enumerate(self.records):
            if set(rec.values) != set(names):
                missing = set(names) - set(rec.values)
                extra = set(rec.values) - set(names)
                raise DatabaseFormatError(
                    f"record {i}: missing fields {sorted(missing)}, "
                    f"undeclared fields {sorted(extra)}"
                )
            for name, value in rec.values.items():
                _check_bits(value, widths[name], f"record {i} field {name!r}")
            key = rec.values[self.key_field]
            if key in seen:
                raise DuplicateKeyError(f"record {i}: duplicate key value {key!r}")
            seen.add(key)

    # -- shape -----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.records)

    @property
    def key_width(self) -> int:
        return self.field(self.key_field).bit_width

    @property
    def is_power_of_two(self) -> bool:
        return self.size & (self.size - 1) == 0

    @property
    def index_bits(self) -> int:
        """n such that 2^n records after padding."""
        return max((self.size - 1).bit_length(), 0)

    def field(self, name: str) -> FieldSpec:
        for f in self.fields:
            if f.name == name:
                return f
        raise UnknownFieldError(f"unknown field {name!r}")

    def key_of(self, index: int) -> str:
        return self.records[index].values[self.key_field]

    def keys(self) -> list[str]:
        return [r.values[self.key_field] for r in self.records]

    def index_of_key(self, value: str) -> int | None:
        for i, rec in enumerate(self.records):
            if rec.values[self.key_field] == value:
                return i
        return None

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "version": FORMAT_VERSION,
            "fields": [{"name": f.name, "bit_width": f.bit_width} for f in self.fields],
            "key_field": self.key_field,
            "records": [dict(r.values) for r in self.records],
        }
        return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class SearchQuery:
    key_value: str
    return_field: str

    def validate(self, db: Database) -> None:
        _check_bits(self.key_value, db.key_width, "query key")
        db.field(self.return_field)


def load_database(document: str) -> Database:
    """Parse and validate a database JSON document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DatabaseFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DatabaseFormatError("top-level document must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise DatabaseFormatError(f"unsupported version {doc.get('version')!r}")
    try:
        fields = tuple(
            FieldSpec(str(entry["name"]), int(entry["bit_width"]))
            for entry in doc["fields"]
        )
        key_field = str(doc["key_field"])
        records = tuple(
            Record({str(k): str(v) for k, v in entry.items()})
            for entry in doc["records"]
        )
    except (KeyError, TypeError) as exc:
        raise DatabaseFormatError(f"malformed document: {exc}") from exc
    return Database(fields=fields, records=records, key_field=key_field)


def load_database_file(path: str) -> Database:
    try:
        with open(path, "r", encoding="ascii") as handle:
            return load_database(handle.read())
    except OSError as exc:
        raise DatabaseFormatError(f"cannot read {path}: {exc}") from exc


def pad_to_power_of_two(db: Database) -> Database:
    """Append sentinel records until the record count is a power of two.

    Sentinel keys are the lexicographically smallest bit strings not yet in
    use; all other sentinel fields are zero.  Idempotent on power-of-two
    databases; key distinctness is preserved.
    """
    if db.is_power_of_two:
        return db
    target = 1 << db.index_bits
    width = db.key_width
    if (1 << width) < target:
        raise KeySpaceExhaustedError(
            f"cannot pad to {target} records: key field has only "
            f"{1 << width} distinct values"
        )
    used = set(db.keys())
    sentinels: list[Record] = []
    candidate = 0
    while len(db.records) + len(sentinels) < target:
        key = format(candidate, f"0{width}b")
        candidate += 1
        if key in used:
            continue
        used.add(key)
        values = {
            f.name: key if f.name == db.key_field else "0" * f.bit_width
            for f in db.fields
        }
        sentinels.append(Record(values, is_sentinel=True))
    return replace(db, records=db.records + tuple(sentinels))


def encode_key(db: Database, value: str) -> str:
    """Data-qubit pattern for a key value: identity mapping, leftmost
    character on data qubit offset 0."""
    _check_bits(value, db.key_width, "key")
    return value
