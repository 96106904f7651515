from .registry import (
    DATA_TYPES,
    DC_ELEMENTS,
    MetadataField,
    MetadataRecord,
    registry_entries,
)
from .validate import ValidationReport, Violation, validate_record
from .crosswalk import crosswalk_to_dc
from .serialize import (
    DC_NS,
    LAGO_NS,
    OAI_DC_NS,
    format_manifest,
    parse_lago,
    parse_manifest,
    parse_oai_dc,
    serialize_lago,
    serialize_oai_dc,
    to_xml_bytes,
)

__all__ = [
    "DATA_TYPES",
    "DC_ELEMENTS",
    "DC_NS",
    "LAGO_NS",
    "OAI_DC_NS",
    "MetadataField",
    "MetadataRecord",
    "ValidationReport",
    "Violation",
    "crosswalk_to_dc",
    "format_manifest",
    "parse_lago",
    "parse_manifest",
    "parse_oai_dc",
    "registry_entries",
    "serialize_lago",
    "serialize_oai_dc",
    "to_xml_bytes",
    "validate_record",
]
