"""Metadata schema registry: the 15 Dublin Core elements plus the lago
capture-extension elements, with value kinds, cardinality and per-datatype
required sets.

The registry is closed: a field whose (schema, element, qualifier) triple is
not registered never validates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

# Data type vocabulary: the three detector data classes plus the generic
# document class.
DATA_TYPES = ("calibration", "wcd-raw", "simulated", "document")

# Canonical dc element order, used for dissemination ordering.
DC_ELEMENTS = (
    "title",
    "subject",
    "description",
    "source",
    "language",
    "relation",
    "coverage",
    "creator",
    "publisher",
    "contributor",
    "rights",
    "date",
    "type",
    "format",
    "identifier",
)

TEXT = "text"
DATETIME_UTC = "datetime-utc"
DECIMAL = "decimal"
IDENTIFIER = "identifier"
CONTROLLED_DATATYPE = "controlled(datatype)"


@dataclass(frozen=True)
class RegistryEntry:
    schema: str
    element: str
    qualifier: Optional[str]
    kind: str
    multivalued: bool
    required_for: frozenset


def _lago(element, qualifier, kind, multi, required_for=()):
    return RegistryEntry("lago", element, qualifier, kind, multi, frozenset(required_for))


_DETECTOR_TYPES = ("calibration", "wcd-raw", "simulated")

_ENTRIES = tuple(
    [
        RegistryEntry("dc", el, None, TEXT, True,
                      frozenset(DATA_TYPES) if el == "title" else frozenset())
        for el in DC_ELEMENTS
    ]
    + [
        _lago("responsible", None, TEXT, False, _DETECTOR_TYPES),
        _lago("contact", None, TEXT, False, _DETECTOR_TYPES),
        _lago("capture", "start", DATETIME_UTC, False, ("wcd-raw",)),
        _lago("capture", "end", DATETIME_UTC, False, ("wcd-raw",)),
        _lago("calibration", "ref", IDENTIFIER, False),
        _lago("resources", None, TEXT, True),
        _lago("problems", None, TEXT, True),
        _lago("pmt", "temperature", DECIMAL, False),
        _lago("pmt", "voltage", DECIMAL, False),
        _lago("site", None, TEXT, False),
        _lago("datatype", None, CONTROLLED_DATATYPE, False, _DETECTOR_TYPES),
    ]
)

REGISTRY = {(e.schema, e.element, e.qualifier): e for e in _ENTRIES}


def registry_entries() -> Iterable[RegistryEntry]:
    return _ENTRIES


def lookup(schema: str, element: str, qualifier: Optional[str]) -> Optional[RegistryEntry]:
    return REGISTRY.get((schema, element, qualifier))


def required_entries(datatype: str) -> Iterable[RegistryEntry]:
    return [e for e in _ENTRIES if datatype in e.required_for]


def field_path(schema: str, element: str, qualifier: Optional[str]) -> str:
    parts = [schema, element]
    if qualifier:
        parts.append(qualifier)
    return ".".join(parts)


@dataclass(frozen=True)
class MetadataField:
    schema: str
    element: str
    qualifier: Optional[str] = None
    value: str = ""
    lang: Optional[str] = None

    @property
    def path(self) -> str:
        return field_path(self.schema, self.element, self.qualifier)


class MetadataRecord:
    """Ordered, multi-valued field list over the dc + lago schemas."""

    def __init__(self, fields: Iterable[MetadataField] = ()):
        self._fields = list(fields)

    def __iter__(self) -> Iterator[MetadataField]:
        return iter(self._fields)

    def __len__(self) -> int:
        return len(self._fields)

    def __eq__(self, other) -> bool:
        return isinstance(other, MetadataRecord) and self._fields == other._fields

    def __repr__(self) -> str:
        return f"MetadataRecord({self._fields!r})"

    def add(self, schema, element, qualifier=None, value="", lang=None) -> "MetadataRecord":
        self._fields.append(MetadataField(schema, element, qualifier, value, lang))
        return self

    def values(self, schema, element, qualifier=None) -> list:
        return [
            f.value
            for f in self._fields
            if f.schema == schema and f.element == element and f.qualifier == qualifier
        ]

    def first(self, schema, element, qualifier=None) -> Optional[str]:
        vals = self.values(schema, element, qualifier)
        return vals[0] if vals else None

    def dc_only(self) -> bool:
        return all(f.schema == "dc" for f in self._fields)

    def multiset(self) -> dict:
        counts: dict = {}
        for f in self._fields:
            key = (f.schema, f.element, f.qualifier, f.value, f.lang)
            counts[key] = counts.get(key, 0) + 1
        return counts
