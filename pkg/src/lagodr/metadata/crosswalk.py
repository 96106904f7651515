"""Crosswalk from the native (dc + lago) record to unqualified Dublin Core.

The mapping is total: every lago field value lands in exactly one dc field.
Fields without a dedicated dc home become prefixed dc.description values.
"""

from __future__ import annotations

from ..errors import InvalidRecord
from .registry import MetadataField, MetadataRecord
from .validate import validate_record

# lago element/qualifier -> dc element for the direct mappings
_DIRECT = {
    ("responsible", None): "creator",
    ("contact", None): "contributor",
    ("datatype", None): "type",
    ("calibration", "ref"): "relation",
}

_DESCRIBED = {
    ("resources", None),
    ("problems", None),
    ("pmt", "temperature"),
    ("pmt", "voltage"),
}


def crosswalk_to_dc(record: MetadataRecord, datatype: str = None) -> MetadataRecord:
    """Return a dc-only record; pre-existing dc fields pass through unchanged.

    When ``datatype`` is given the record is validated first and an invalid
    record raises InvalidRecord.
    """
    if datatype is not None:
        report = validate_record(record, datatype)
        if not report.ok:
            raise InvalidRecord("record does not validate for its datatype")

    out: list[MetadataField] = [f for f in record if f.schema == "dc"]

    start = record.first("lago", "capture", "start")
    end = record.first("lago", "capture", "end")
    if start or end:
        # ISO 8601 interval; a lone bound becomes an open interval
        interval = f"{start or '..'}/{end or '..'}"
        out.append(MetadataField("dc", "coverage", value=interval))

    site = record.first("lago", "site")
    if site is not None:
        out.append(MetadataField("dc", "coverage", value=site))

    for f in record:
        if f.schema != "lago":
            continue
        key = (f.element, f.qualifier)
        if key in (("capture", "start"), ("capture", "end"), ("site", None)):
            continue
        if key in _DIRECT:
            out.append(MetadataField("dc", _DIRECT[key], value=f.value, lang=f.lang))
        elif key in _DESCRIBED:
            out.append(MetadataField("dc", "description", value=f"{f.path}: {f.value}", lang=f.lang))
        else:
            # closed registry makes this unreachable for validated records,
            # but totality must hold for any input
            out.append(MetadataField("dc", "description", value=f"{f.path}: {f.value}", lang=f.lang))

    return MetadataRecord(out)
