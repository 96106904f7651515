"""Structural conformance checking of OAI-PMH 2.0 responses.

No XSD engine is available in this environment, so the constraints of the
official OAI-PMH.xsd and oai_dc.xsd (element order, cardinalities, attribute
and value patterns) are encoded here directly. Used both as the test oracle
for server output and by the harvester to reject schema-invalid peer pages.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from ..errors import ProtocolError
from ..metadata.registry import DC_ELEMENTS
from ..metadata.serialize import DC_NS, OAI_DC_NS, XSI_NS
from .server import ERROR_CODES, OAI_NS

_UTC_SECONDS = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")
_UTC_DAYS = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_SET_SPEC = re.compile(r"^[A-Za-z0-9\-_.!~*'()]+(:[A-Za-z0-9\-_.!~*'()]+)*$")

_VERB_TAGS = {
    "Identify", "ListMetadataFormats", "ListSets", "GetRecord",
    "ListIdentifiers", "ListRecords",
}


def _q(tag: str) -> str:
    return f"{{{OAI_NS}}}{tag}"


def _fail(message: str):
    raise ProtocolError(f"OAI-PMH conformance: {message}")


def _require_datestamp(value, where: str, allow_days: bool = False):
    if value is None or not (
        _UTC_SECONDS.match(value) or (allow_days and _UTC_DAYS.match(value))
    ):
        _fail(f"{where}: bad UTC datestamp {value!r}")


def _check_sequence(element: ET.Element, expected: list, where: str):
    """expected: list of (tag, min, max) with max=None for unbounded."""
    children = list(element)
    i = 0
    for tag, lo, hi in expected:
        n = 0
        while i < len(children) and children[i].tag == _q(tag):
            n += 1
            i += 1
        if n < lo:
            _fail(f"{where}: expected at least {lo} <{tag}>, found {n}")
        if hi is not None and n > hi:
            _fail(f"{where}: expected at most {hi} <{tag}>, found {n}")
    if i != len(children):
        _fail(f"{where}: unexpected element {children[i].tag}")


def validate_oai_dc_payload(element: ET.Element):
    if element.tag != f"{{{OAI_DC_NS}}}dc":
        _fail(f"oai_dc payload root is {element.tag}")
    for child in element:
        m = re.match(r"\{(.+)\}(.+)$", child.tag)
        if not m or m.group(1) != DC_NS or m.group(2) not in DC_ELEMENTS:
            _fail(f"oai_dc payload: illegal element {child.tag}")
        if len(child):
            _fail(f"oai_dc payload: {child.tag} must be simple content")


def _validate_header(header: ET.Element):
    status = header.get("status")
    if status is not None and status != "deleted":
        _fail(f"header status must be 'deleted', got {status!r}")
    _check_sequence(header, [("identifier", 1, 1), ("datestamp", 1, 1),
                             ("setSpec", 0, None)], "header")
    identifier = header.find(_q("identifier")).text or ""
    if not identifier.startswith("oai:"):
        _fail(f"identifier {identifier!r} lacks the oai: prefix")
    _require_datestamp(header.find(_q("datestamp")).text, "header", allow_days=True)
    for spec in header.findall(_q("setSpec")):
        if not spec.text or not _SET_SPEC.match(spec.text):
            _fail(f"bad setSpec {spec.text!r}")


def _validate_record(record: ET.Element):
    children = list(record)
    if not children or children[0].tag != _q("header"):
        _fail("record must start with a header")
    header = children[0]
    _validate_header(header)
    deleted = header.get("status") == "deleted"
    rest = children[1:]
    if deleted:
        if any(c.tag == _q("metadata") for c in rest):
            _fail("deleted record must not carry metadata")
    else:
        if not rest or rest[0].tag != _q("metadata"):
            _fail("non-deleted record must carry metadata")
        metadata = rest[0]
        payloads = list(metadata)
        if len(payloads) != 1:
            _fail("metadata must hold exactly one payload root")
        if payloads[0].tag == f"{{{OAI_DC_NS}}}dc":
            validate_oai_dc_payload(payloads[0])
        rest = rest[1:]
    for extra in rest:
        if extra.tag not in (_q("about"),):
            _fail(f"unexpected element {extra.tag} in record")


def _validate_resumption_token(el: ET.Element):
    if el.get("expirationDate") is not None:
        _require_datestamp(el.get("expirationDate"), "resumptionToken")
    for attr in ("completeListSize", "cursor"):
        value = el.get(attr)
        if value is not None and not value.isdigit():
            _fail(f"resumptionToken @{attr} must be a non-negative integer")


def _validate_list(body: ET.Element, item_tag: str, validator):
    children = list(body)
    if not children:
        _fail(f"{body.tag}: empty list is not schema-valid")
    token = None
    if children and children[-1].tag == _q("resumptionToken"):
        token = children.pop()
    for child in children:
        if child.tag != _q(item_tag):
            _fail(f"{body.tag}: unexpected element {child.tag}")
        validator(child)
    if not children:
        _fail(f"{body.tag}: at least one <{item_tag}> required")
    if token is not None:
        _validate_resumption_token(token)


def _validate_identify(body: ET.Element):
    _check_sequence(body, [
        ("repositoryName", 1, 1), ("baseURL", 1, 1), ("protocolVersion", 1, 1),
        ("adminEmail", 1, None), ("earliestDatestamp", 1, 1),
        ("deletedRecord", 1, 1), ("granularity", 1, 1),
        ("compression", 0, None), ("description", 0, None),
    ], "Identify")
    if body.find(_q("protocolVersion")).text != "2.0":
        _fail("protocolVersion must be 2.0")
    _require_datestamp(body.find(_q("earliestDatestamp")).text, "Identify",
                       allow_days=True)
    if body.find(_q("deletedRecord")).text not in ("no", "persistent", "transient"):
        _fail("illegal deletedRecord policy")
    if body.find(_q("granularity")).text not in ("YYYY-MM-DD", "YYYY-MM-DDThh:mm:ssZ"):
        _fail("illegal granularity")


def _validate_set(el: ET.Element):
    _check_sequence(el, [("setSpec", 1, 1), ("setName", 1, 1),
                         ("setDescription", 0, None)], "set")
    spec = el.find(_q("setSpec")).text or ""
    if not _SET_SPEC.match(spec):
        _fail(f"bad setSpec {spec!r}")


def _validate_metadata_format(el: ET.Element):
    _check_sequence(el, [("metadataPrefix", 1, 1), ("schema", 1, 1),
                         ("metadataNamespace", 1, 1)], "metadataFormat")


def validate_oai_response(data: bytes) -> ET.Element:
    """Parse and check one protocol response; returns the root element.

    Raises ProtocolError on any deviation from the protocol schema.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ProtocolError(f"response is not well-formed XML: {exc}") from exc

    if root.tag != _q("OAI-PMH"):
        _fail(f"root element is {root.tag}")
    children = list(root)
    if len(children) < 2:
        _fail("response must carry responseDate and request")
    if children[0].tag != _q("responseDate"):
        _fail("first child must be responseDate")
    _require_datestamp(children[0].text, "responseDate")
    if children[1].tag != _q("request"):
        _fail("second child must be request")
    if not (children[1].text or "").strip():
        _fail("request element must carry the base URL")

    rest = children[2:]
    if not rest:
        _fail("response carries neither error nor verb payload")
    if rest[0].tag == _q("error"):
        for err in rest:
            if err.tag != _q("error"):
                _fail("errors cannot mix with verb payloads")
            if err.get("code") not in ERROR_CODES:
                _fail(f"unknown error code {err.get('code')!r}")
        return root

    if len(rest) != 1:
        _fail("exactly one verb payload expected")
    body = rest[0]
    tag = body.tag[len(_q("")):] if body.tag.startswith(_q("")) else body.tag
    if tag not in _VERB_TAGS:
        _fail(f"unknown verb payload {body.tag}")
    verb_attr = children[1].get("verb")
    if verb_attr is not None and verb_attr != tag:
        _fail(f"request echoes verb {verb_attr!r} but payload is {tag}")

    if tag == "Identify":
        _validate_identify(body)
    elif tag == "ListSets":
        _validate_list(body, "set", _validate_set)
    elif tag == "ListMetadataFormats":
        _validate_list(body, "metadataFormat", _validate_metadata_format)
    elif tag == "GetRecord":
        records = list(body)
        if len(records) != 1 or records[0].tag != _q("record"):
            _fail("GetRecord must hold exactly one record")
        _validate_record(records[0])
    elif tag == "ListRecords":
        _validate_list(body, "record", _validate_record)
    elif tag == "ListIdentifiers":
        _validate_list(body, "header", _validate_header)
    return root
