"""Wire formats for metadata records.

Three formats live here:
  * the oai_dc XML fragment (protocol dissemination of dc-only records),
  * the native "lago" XML fragment (lossless dissemination),
  * the flat manifest text format (ingest and bulk load).
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from .registry import DC_ELEMENTS, MetadataField, MetadataRecord

OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
DC_NS = "http://purl.org/dc/elements/1.1/"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
XML_NS = "http://www.w3.org/XML/1998/namespace"
LAGO_NS = "urn:lago-dr:metadata"

OAI_DC_SCHEMA_LOCATION = (
    "http://www.openarchives.org/OAI/2.0/oai_dc/ "
    "http://www.openarchives.org/OAI/2.0/oai_dc.xsd"
)


def serialize_oai_dc(record: MetadataRecord) -> ET.Element:
    """Emit the oai_dc container; children in registry order then record order."""
    if not record.dc_only():
        raise ValueError("oai_dc serialization requires a dc-only record")
    root = ET.Element(f"{{{OAI_DC_NS}}}dc")
    root.set(f"{{{XSI_NS}}}schemaLocation", OAI_DC_SCHEMA_LOCATION)
    for element in DC_ELEMENTS:
        for f in record:
            if f.element != element:
                continue
            child = ET.SubElement(root, f"{{{DC_NS}}}{element}")
            child.text = f.value
            if f.lang:
                child.set(f"{{{XML_NS}}}lang", f.lang)
    return root


def parse_oai_dc(element: ET.Element) -> MetadataRecord:
    fields = []
    for child in element:
        m = re.match(r"\{(.+)\}(.+)", child.tag)
        if not m or m.group(1) != DC_NS:
            raise ValueError(f"unexpected element in oai_dc payload: {child.tag}")
        fields.append(
            MetadataField(
                "dc",
                m.group(2),
                value=child.text or "",
                lang=child.get(f"{{{XML_NS}}}lang"),
            )
        )
    return MetadataRecord(fields)


def serialize_lago(record: MetadataRecord) -> ET.Element:
    root = ET.Element(f"{{{LAGO_NS}}}record")
    for f in record:
        child = ET.SubElement(root, f"{{{LAGO_NS}}}field")
        child.set("schema", f.schema)
        child.set("element", f.element)
        if f.qualifier:
            child.set("qualifier", f.qualifier)
        if f.lang:
            child.set(f"{{{XML_NS}}}lang", f.lang)
        child.text = f.value
    return root


def parse_lago(element: ET.Element) -> MetadataRecord:
    fields = []
    for child in element:
        if child.tag != f"{{{LAGO_NS}}}field":
            raise ValueError(f"unexpected element in lago payload: {child.tag}")
        fields.append(
            MetadataField(
                child.get("schema", ""),
                child.get("element", ""),
                child.get("qualifier"),
                child.text or "",
                child.get(f"{{{XML_NS}}}lang"),
            )
        )
    return MetadataRecord(fields)


def to_xml_bytes(element: ET.Element) -> bytes:
    return ET.tostring(element, encoding="utf-8", xml_declaration=True)


# --- manifest text format: `schema.element[.qualifier][@lang] = value` ---

_KEY_RE = re.compile(r"^([a-z]+)\.([a-zA-Z0-9_-]+)(?:\.([a-zA-Z0-9_-]+))?(?:@([a-z]{2}))?$")


def _escape_value(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\n", "\\n")


def _unescape_value(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            out.append("\n" if nxt == "n" else nxt)
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def format_manifest(record: MetadataRecord, extras: list[tuple[str, str]] = ()) -> str:
    lines = []
    for f in record:
        key = f.path + (f"@{f.lang}" if f.lang else "")
        lines.append(f"{key} = {_escape_value(f.value)}")
    for key, value in extras:
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> tuple[MetadataRecord, list[tuple[str, str]]]:
    """Parse manifest text; keys without a schema dot come back as extras."""
    fields = []
    extras = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"manifest line {lineno}: missing '='")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        m = _KEY_RE.match(key)
        if m:
            schema, element, qualifier, lang = m.groups()
            fields.append(MetadataField(schema, element, qualifier, _unescape_value(value), lang))
        else:
            extras.append((key, value))
    return MetadataRecord(fields), extras
