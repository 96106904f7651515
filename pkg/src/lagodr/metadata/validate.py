"""Record validation against the schema registry, per data type."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from decimal import Decimal, InvalidOperation

from ..util import parse_utc
from . import registry
from .registry import DATA_TYPES, MetadataRecord, field_path

MISSING_REQUIRED = "MissingRequired"
UNKNOWN_FIELD = "UnknownField"
TYPE_MISMATCH = "TypeMismatch"
VOCABULARY_VIOLATION = "VocabularyViolation"
INTERVAL_INVERTED = "IntervalInverted"


@dataclass(frozen=True)
class Violation:
    path: str
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"path": v.path, "code": v.code, "message": v.message}
                for v in self.violations
            ],
        }


def _check_kind(entry, value: str) -> str | None:
    if entry.kind == registry.DATETIME_UTC:
        try:
            parse_utc(value)
        except ValueError:
            return "expected a YYYY-MM-DDThh:mm:ssZ datetime"
    elif entry.kind == registry.DECIMAL:
        try:
            Decimal(value)
        except InvalidOperation:
            return "expected a decimal number"
    return None


def validate_record(record: MetadataRecord, datatype: str) -> ValidationReport:
    """Collect every violation; violations are data, not faults.

    The violation list is sorted so permuting record fields never changes it.
    """
    if datatype not in DATA_TYPES:
        raise ValueError(f"unknown datatype {datatype!r}")

    violations: list[Violation] = []
    seen: dict = {}

    for f in record:
        entry = registry.lookup(f.schema, f.element, f.qualifier)
        if entry is None:
            violations.append(Violation(f.path, UNKNOWN_FIELD, "not in the schema registry"))
            continue
        seen[(f.schema, f.element, f.qualifier)] = seen.get((f.schema, f.element, f.qualifier), 0) + 1
        if not f.value.strip():
            violations.append(Violation(f.path, TYPE_MISMATCH, "empty value"))
            continue
        kind_error = _check_kind(entry, f.value)
        if kind_error:
            violations.append(Violation(f.path, TYPE_MISMATCH, kind_error))
            continue
        if entry.kind == registry.CONTROLLED_DATATYPE and f.value not in DATA_TYPES:
            violations.append(
                Violation(f.path, VOCABULARY_VIOLATION,
                          f"value must be one of {', '.join(DATA_TYPES)}")
            )

    for key, count in sorted(seen.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or "")):
        entry = registry.lookup(*key)
        if entry is not None and not entry.multivalued and count > 1:
            violations.append(
                Violation(field_path(*key), VOCABULARY_VIOLATION, "element is single-valued")
            )

    for entry in registry.required_entries(datatype):
        if (entry.schema, entry.element, entry.qualifier) not in seen:
            violations.append(
                Violation(field_path(entry.schema, entry.element, entry.qualifier),
                          MISSING_REQUIRED, f"required for datatype {datatype}")
            )

    start = record.first("lago", "capture", "start")
    end = record.first("lago", "capture", "end")
    if start and end:
        try:
            if parse_utc(end) < parse_utc(start):
                violations.append(
                    Violation("lago.capture.end", INTERVAL_INVERTED,
                              "capture end precedes capture start")
                )
        except ValueError:
            pass  # already reported as TypeMismatch

    violations.sort(key=lambda v: (v.path, v.code, v.message))
    return ValidationReport(violations)
