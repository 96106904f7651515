"""OAI-PMH 2.0 protocol endpoint over the repository.

All error handling is in-band: handle() always returns a protocol response
document. Paging is cursor-based over the stable (datestamp, pid number)
ordering, so inserts during a harvest never cause silent skips.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import timedelta
from typing import Optional

from ..errors import BadToken, UnknownNode, UnknownPid
from ..metadata import crosswalk_to_dc, serialize_lago, serialize_oai_dc
from ..metadata.serialize import LAGO_NS, XSI_NS
from ..storage.repository import Item, Repository
from ..util import format_utc, now_utc, parse_utc
from .tokens import ResumptionToken, decode_token

OAI_NS = "http://www.openarchives.org/OAI/2.0/"
OAI_SCHEMA_LOCATION = (
    "http://www.openarchives.org/OAI/2.0/ "
    "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"
)

VERBS = {
    "Identify": set(),
    "ListMetadataFormats": {"identifier"},
    "ListSets": {"resumptionToken"},
    "GetRecord": {"identifier", "metadataPrefix"},
    "ListIdentifiers": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
    "ListRecords": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
}
REQUIRED = {
    "GetRecord": {"identifier", "metadataPrefix"},
}

METADATA_FORMATS = {
    "oai_dc": (
        "http://www.openarchives.org/OAI/2.0/oai_dc.xsd",
        "http://www.openarchives.org/OAI/2.0/oai_dc/",
    ),
    "lago": ("/schemas/lago.xsd", LAGO_NS),
}

ERROR_CODES = {
    "badVerb", "badArgument", "badResumptionToken", "cannotDisseminateFormat",
    "idDoesNotExist", "noRecordsMatch", "noSetHierarchy", "noMetadataFormats",
}

ET.register_namespace("oai_dc", "http://www.openarchives.org/OAI/2.0/oai_dc/")
ET.register_namespace("dc", "http://purl.org/dc/elements/1.1/")
ET.register_namespace("xsi", XSI_NS)
ET.register_namespace("lago", LAGO_NS)


@dataclass
class OaiConfig:
    repository_name: str = "LAGO Data Repository"
    repo_id: str = "lago-dr.example.org"
    base_url: str = "http://localhost:8080"
    admin_email: str = "admin@lago-dr.example.org"
    page_size: int = 100
    token_ttl_hours: int = 24


class _OaiError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _parse_protocol_date(value: str, is_until: bool) -> object:
    """Accept both protocol granularities; day granularity widens to the
    enclosing seconds range."""
    if len(value) == 10:
        suffix = "T23:59:59Z" if is_until else "T00:00:00Z"
        return parse_utc(value + suffix)
    return parse_utc(value)


class OaiServer:
    def __init__(self, repo: Repository, config: OaiConfig = None):
        self.repo = repo
        self.config = config or OaiConfig()

    # --- entry point ---

    def handle(self, args: dict) -> bytes:
        args = {k: v for k, v in args.items()}
        verb = args.pop("verb", None)
        root = ET.Element(f"{{{OAI_NS}}}OAI-PMH")
        root.set(f"{{{XSI_NS}}}schemaLocation", OAI_SCHEMA_LOCATION)
        rd = ET.SubElement(root, f"{{{OAI_NS}}}responseDate")
        rd.text = format_utc(now_utc())
        request = ET.SubElement(root, f"{{{OAI_NS}}}request")
        request.text = f"{self.config.base_url}/oai"

        try:
            if verb not in VERBS:
                raise _OaiError("badVerb", f"illegal verb {verb!r}")
            allowed = VERBS[verb]
            unknown = set(args) - allowed
            if unknown:
                raise _OaiError("badArgument", f"illegal arguments: {sorted(unknown)}")
            missing = REQUIRED.get(verb, set()) - set(args)
            if missing:
                raise _OaiError("badArgument", f"missing arguments: {sorted(missing)}")
            if "resumptionToken" in args and len(args) > 1:
                raise _OaiError("badArgument", "resumptionToken is an exclusive argument")
            if verb in ("ListIdentifiers", "ListRecords") and not args.get(
                "resumptionToken"
            ) and "metadataPrefix" not in args:
                raise _OaiError("badArgument", "metadataPrefix is required")

            body = getattr(self, "_" + verb)(args)
        except _OaiError as err:
            # badVerb/badArgument responses must not echo request attributes
            if err.code not in ("badVerb", "badArgument"):
                self._echo(request, verb, args)
            error = ET.SubElement(root, f"{{{OAI_NS}}}error")
            error.set("code", err.code)
            error.text = err.message
            return self._tostring(root)

        self._echo(request, verb, args)
        root.append(body)
        return self._tostring(root)

    @staticmethod
    def _tostring(root: ET.Element) -> bytes:
        return ET.tostring(root, encoding="utf-8", xml_declaration=True)

    @staticmethod
    def _echo(request: ET.Element, verb: Optional[str], args: dict):
        if verb:
            request.set("verb", verb)
        for key, value in args.items():
            request.set(key, value)

    # --- verbs ---

    def _Identify(self, args: dict) -> ET.Element:
        el = ET.Element(f"{{{OAI_NS}}}Identify")
        values = [
            ("repositoryName", self.config.repository_name),
            ("baseURL", f"{self.config.base_url}/oai"),
            ("protocolVersion", "2.0"),
            ("adminEmail", self.config.admin_email),
            ("earliestDatestamp", format_utc(self.repo.earliest_datestamp())),
            ("deletedRecord", "persistent"),
            ("granularity", "YYYY-MM-DDThh:mm:ssZ"),
        ]
        for tag, text in values:
            child = ET.SubElement(el, f"{{{OAI_NS}}}{tag}")
            child.text = text
        return el

    def _ListMetadataFormats(self, args: dict) -> ET.Element:
        if "identifier" in args:
            self._resolve_identifier(args["identifier"])  # raises idDoesNotExist
        el = ET.Element(f"{{{OAI_NS}}}ListMetadataFormats")
        for prefix, (schema, namespace) in METADATA_FORMATS.items():
            mf = ET.SubElement(el, f"{{{OAI_NS}}}metadataFormat")
            ET.SubElement(mf, f"{{{OAI_NS}}}metadataPrefix").text = prefix
            ET.SubElement(mf, f"{{{OAI_NS}}}schema").text = schema
            ET.SubElement(mf, f"{{{OAI_NS}}}metadataNamespace").text = namespace
        return el

    def _ListSets(self, args: dict) -> ET.Element:
        if "resumptionToken" in args:
            raise _OaiError("badResumptionToken", "set list is never paged")
        nodes = self.repo.all_nodes()
        if not nodes:
            raise _OaiError("noSetHierarchy", "the repository has no sets yet")
        el = ET.Element(f"{{{OAI_NS}}}ListSets")
        for node in nodes:
            s = ET.SubElement(el, f"{{{OAI_NS}}}set")
            ET.SubElement(s, f"{{{OAI_NS}}}setSpec").text = self.repo.set_spec(node.id)
            ET.SubElement(s, f"{{{OAI_NS}}}setName").text = node.name
        return el

    def _GetRecord(self, args: dict) -> ET.Element:
        prefix = args["metadataPrefix"]
        if prefix not in METADATA_FORMATS:
            raise _OaiError("cannotDisseminateFormat", f"unknown prefix {prefix!r}")
        item = self._resolve_identifier(args["identifier"])
        el = ET.Element(f"{{{OAI_NS}}}GetRecord")
        el.append(self._record(item, prefix))
        return el

    def _ListRecords(self, args: dict) -> ET.Element:
        return self._list(args, headers_only=False)

    def _ListIdentifiers(self, args: dict) -> ET.Element:
        return self._list(args, headers_only=True)

    # --- listing machinery ---

    def _list(self, args: dict, headers_only: bool) -> ET.Element:
        token: Optional[ResumptionToken] = None
        if args.get("resumptionToken"):
            try:
                token = decode_token(args["resumptionToken"])
            except BadToken as exc:
                raise _OaiError("badResumptionToken", str(exc))
            ttl = timedelta(hours=self.config.token_ttl_hours)
            if now_utc() - token.issued_at > ttl:
                raise _OaiError("badResumptionToken", "token expired")
            prefix = token.metadata_prefix
            from_, until, set_spec = token.from_, token.until, token.set_spec
            after = (token.cursor_datestamp, token.cursor_num)
        else:
            prefix = args["metadataPrefix"]
            from_ = until = None
            set_spec = args.get("set")
            after = None
            try:
                if "from" in args:
                    from_ = _parse_protocol_date(args["from"], is_until=False)
                if "until" in args:
                    until = _parse_protocol_date(args["until"], is_until=True)
            except ValueError as exc:
                raise _OaiError("badArgument", str(exc))
            if from_ and until and from_ > until:
                raise _OaiError("badArgument", "from is later than until")

        if prefix not in METADATA_FORMATS:
            raise _OaiError("cannotDisseminateFormat", f"unknown prefix {prefix!r}")

        if set_spec is not None:
            try:
                self.repo.node_by_set_spec(set_spec)
            except UnknownNode:
                raise _OaiError("noRecordsMatch", f"no such set {set_spec!r}")

        page_size = self.config.page_size
        items = self.repo.list_items(set_spec, from_, until, after=after,
                                     limit=page_size + 1)
        if not items and token is None:
            raise _OaiError("noRecordsMatch", "no records satisfy the request")

        more = len(items) > page_size
        page = items[:page_size]

        tag = "ListIdentifiers" if headers_only else "ListRecords"
        el = ET.Element(f"{{{OAI_NS}}}{tag}")
        for item in page:
            if headers_only:
                el.append(self._header(item))
            else:
                el.append(self._record(item, prefix))

        delivered_before = token.delivered if token else 0
        if more:
            size = token.complete_list_size if token else self.repo.count_items(
                set_spec, from_, until
            )
            last = page[-1]
            next_token = ResumptionToken(
                cursor_datestamp=last.datestamp,
                cursor_num=last.num,
                metadata_prefix=prefix,
                from_=from_,
                until=until,
                set_spec=set_spec,
                issued_at=now_utc(),
                complete_list_size=size,
                delivered=delivered_before + len(page),
            )
            rt = ET.SubElement(el, f"{{{OAI_NS}}}resumptionToken")
            rt.set("completeListSize", str(size))
            rt.set("cursor", str(delivered_before))
            rt.set(
                "expirationDate",
                format_utc(now_utc() + timedelta(hours=self.config.token_ttl_hours)),
            )
            rt.text = next_token.encode()
        elif token is not None:
            # final page of a paged list: empty token closes the sequence
            rt = ET.SubElement(el, f"{{{OAI_NS}}}resumptionToken")
            rt.set("completeListSize", str(token.complete_list_size))
            rt.set("cursor", str(delivered_before))
        return el

    # --- record building ---

    def oai_identifier(self, pid: str) -> str:
        return f"oai:{self.config.repo_id}:{pid}"

    def _resolve_identifier(self, identifier: str) -> Item:
        prefix = f"oai:{self.config.repo_id}:"
        if not identifier.startswith(prefix):
            raise _OaiError("idDoesNotExist", f"unknown identifier {identifier!r}")
        pid = identifier[len(prefix):]
        try:
            return self.repo.get_item(pid)
        except UnknownPid:
            raise _OaiError("idDoesNotExist", f"unknown identifier {identifier!r}")

    def _header(self, item: Item) -> ET.Element:
        header = ET.Element(f"{{{OAI_NS}}}header")
        if item.withdrawn:
            header.set("status", "deleted")
        ET.SubElement(header, f"{{{OAI_NS}}}identifier").text = self.oai_identifier(item.pid)
        ET.SubElement(header, f"{{{OAI_NS}}}datestamp").text = format_utc(item.datestamp)
        for spec in self.repo.ancestor_specs(item.collection):
            ET.SubElement(header, f"{{{OAI_NS}}}setSpec").text = spec
        return header

    def _record(self, item: Item, prefix: str) -> ET.Element:
        record = ET.Element(f"{{{OAI_NS}}}record")
        record.append(self._header(item))
        if not item.withdrawn:
            metadata = ET.SubElement(record, f"{{{OAI_NS}}}metadata")
            if prefix == "oai_dc":
                metadata.append(serialize_oai_dc(crosswalk_to_dc(item.record)))
            else:
                metadata.append(serialize_lago(item.record))
        return record
