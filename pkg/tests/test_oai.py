import xml.etree.ElementTree as ET
from datetime import timedelta

import pytest

from lagodr.metadata import parse_lago
from lagodr.oai import OaiConfig, OaiServer, decode_token, validate_oai_response
from lagodr.oai.server import OAI_NS
from lagodr.oai.tokens import ResumptionToken
from lagodr.util import format_utc, now_utc, parse_utc

from conftest import make_files, make_record

NS = f"{{{OAI_NS}}}"


def error_code(response: bytes):
    root = validate_oai_response(response)
    errors = root.findall(NS + "error")
    return errors[0].get("code") if errors else None


def walk_pages(server, first_args):
    """Follow resumption tokens; returns (identifier list, page count)."""
    identifiers = []
    pages = 0
    args = dict(first_args)
    while True:
        root = validate_oai_response(server.handle(args))
        pages += 1
        if root.findall(NS + "error"):
            return identifiers, pages, error_code_root(root)
        body = root.find(NS + first_args["verb"])
        for header in body.iter(NS + "header"):
            identifiers.append(header.find(NS + "identifier").text)
        token = body.find(NS + "resumptionToken")
        if token is None or not (token.text or "").strip():
            return identifiers, pages, None
        args = {"verb": first_args["verb"], "resumptionToken": token.text}


def error_code_root(root):
    errors = root.findall(NS + "error")
    return errors[0].get("code") if errors else None


@pytest.fixture
def populated_server(seeded_repo):
    col = seeded_repo.node_by_set_spec("ve:ula:wcd-raw")
    bo = seeded_repo.node_by_set_spec("bo:umsa:simulated")
    for i in range(5):
        seeded_repo.add_item(col.id, make_record(i), make_files(i))
    for i in range(5, 8):
        seeded_repo.add_item(bo.id, make_record(i, datatype="simulated"),
                             make_files(i))
    return OaiServer(seeded_repo, OaiConfig(page_size=3))


class TestIdentify:
    def test_payload(self, oai_server, seeded_repo):
        root = validate_oai_response(oai_server.handle({"verb": "Identify"}))
        body = root.find(NS + "Identify")
        get = lambda tag: body.find(NS + tag).text
        assert get("protocolVersion") == "2.0"
        assert get("deletedRecord") == "persistent"
        assert get("granularity") == "YYYY-MM-DDThh:mm:ssZ"
        assert get("repositoryName")


class TestErrors:
    def test_bad_verb(self, oai_server):
        assert error_code(oai_server.handle({"verb": "Frobnicate"})) == "badVerb"

    def test_missing_verb(self, oai_server):
        assert error_code(oai_server.handle({})) == "badVerb"

    def test_no_records_match_on_empty(self, oai_server):
        response = oai_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc"})
        assert error_code(response) == "noRecordsMatch"

    def test_illegal_argument(self, oai_server):
        response = oai_server.handle({"verb": "Identify", "set": "ve"})
        assert error_code(response) == "badArgument"

    def test_missing_metadata_prefix(self, oai_server):
        assert error_code(oai_server.handle({"verb": "ListRecords"})) == "badArgument"

    def test_token_exclusivity(self, oai_server):
        response = oai_server.handle(
            {"verb": "ListRecords", "resumptionToken": "x", "set": "ve"})
        assert error_code(response) == "badArgument"

    def test_malformed_token(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListRecords", "resumptionToken": "@@not-a-token@@"})
        assert error_code(response) == "badResumptionToken"

    def test_expired_token(self, populated_server):
        stale = ResumptionToken(
            cursor_datestamp=parse_utc("2008-01-01T00:00:00Z"), cursor_num=1,
            metadata_prefix="oai_dc", from_=None, until=None, set_spec=None,
            issued_at=now_utc() - timedelta(hours=25), complete_list_size=8,
            delivered=3)
        response = populated_server.handle(
            {"verb": "ListRecords", "resumptionToken": stale.encode()})
        assert error_code(response) == "badResumptionToken"

    def test_cannot_disseminate(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "marcxml"})
        assert error_code(response) == "cannotDisseminateFormat"

    def test_id_does_not_exist(self, populated_server):
        response = populated_server.handle(
            {"verb": "GetRecord", "metadataPrefix": "oai_dc",
             "identifier": "oai:lago-dr.example.org:lago/999"})
        assert error_code(response) == "idDoesNotExist"

    def test_bad_date(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc",
             "from": "last tuesday"})
        assert error_code(response) == "badArgument"

    def test_from_after_until(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc",
             "from": "2020-01-01", "until": "2010-01-01"})
        assert error_code(response) == "badArgument"

    def test_empty_range(self, populated_server, seeded_repo):
        beyond = format_utc(max(i.datestamp for i in seeded_repo.list_items())
                            + timedelta(seconds=1))
        response = populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc", "from": beyond})
        assert error_code(response) == "noRecordsMatch"


class TestGetRecord:
    def test_set_spec_chain(self, populated_server):
        root = validate_oai_response(populated_server.handle(
            {"verb": "GetRecord", "metadataPrefix": "oai_dc",
             "identifier": "oai:lago-dr.example.org:lago/1"}))
        specs = [s.text for s in root.iter(NS + "setSpec")]
        assert specs == ["ve", "ve:ula", "ve:ula:wcd-raw"]

    def test_deleted_status(self, populated_server, seeded_repo):
        seeded_repo.withdraw_item("lago/2")
        root = validate_oai_response(populated_server.handle(
            {"verb": "GetRecord", "metadataPrefix": "oai_dc",
             "identifier": "oai:lago-dr.example.org:lago/2"}))
        header = next(root.iter(NS + "header"))
        assert header.get("status") == "deleted"
        assert root.find(f"{NS}GetRecord/{NS}record/{NS}metadata") is None

    def test_lago_format_lossless(self, populated_server, seeded_repo):
        item = seeded_repo.get_item("lago/3")
        root = validate_oai_response(populated_server.handle(
            {"verb": "GetRecord", "metadataPrefix": "lago",
             "identifier": "oai:lago-dr.example.org:lago/3"}))
        payload = root.find(f"{NS}GetRecord/{NS}record/{NS}metadata/")
        assert parse_lago(payload) == item.record

    def test_unknown_prefix(self, populated_server):
        response = populated_server.handle(
            {"verb": "GetRecord", "metadataPrefix": "marcxml",
             "identifier": "oai:lago-dr.example.org:lago/1"})
        assert error_code(response) == "cannotDisseminateFormat"


class TestListSets:
    def test_hierarchy_mirror(self, populated_server, seeded_repo):
        root = validate_oai_response(populated_server.handle({"verb": "ListSets"}))
        specs = {s.text for s in root.iter(NS + "setSpec")}
        assert len(specs) == 15
        assert "ve" in specs and "ve:ula" in specs and "ve:ula:wcd-raw" in specs

    def test_formats(self, populated_server):
        root = validate_oai_response(populated_server.handle(
            {"verb": "ListMetadataFormats"}))
        prefixes = {p.text for p in root.iter(NS + "metadataPrefix")}
        assert prefixes == {"oai_dc", "lago"}

    def test_formats_unknown_identifier(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListMetadataFormats",
             "identifier": "oai:lago-dr.example.org:lago/999"})
        assert error_code(response) == "idDoesNotExist"


class TestPaging:
    def test_pages_match_unpaged_oracle(self, populated_server, seeded_repo):
        # oracle: direct repository scan in (datestamp, pid) order
        oracle = [f"oai:lago-dr.example.org:{i.pid}"
                  for i in seeded_repo.list_items()]
        paged, pages, err = walk_pages(
            populated_server, {"verb": "ListRecords", "metadataPrefix": "oai_dc"})
        assert err is None
        assert paged == oracle
        assert len(set(paged)) == len(paged)
        assert pages == 3  # 8 records, page size 3

    def test_set_filter_matches_ancestor_oracle(self, populated_server, seeded_repo):
        for spec in ("ve", "bo", "ve:ula", "bo:umsa:simulated", "mx"):
            oracle = []
            for item in seeded_repo.list_items():
                if spec in seeded_repo.ancestor_specs(item.collection):
                    oracle.append(f"oai:lago-dr.example.org:{item.pid}")
            got, _, err = walk_pages(
                populated_server,
                {"verb": "ListRecords", "metadataPrefix": "oai_dc", "set": spec})
            if not oracle:
                assert err == "noRecordsMatch"
            else:
                assert got == oracle

    def test_identifiers_equal_records(self, populated_server):
        a, _, _ = walk_pages(populated_server,
                             {"verb": "ListRecords", "metadataPrefix": "oai_dc"})
        b, _, _ = walk_pages(populated_server,
                             {"verb": "ListIdentifiers", "metadataPrefix": "oai_dc"})
        assert a == b

    def test_insert_during_harvest_not_skipped(self, populated_server, seeded_repo):
        first = validate_oai_response(populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc"}))
        token = first.find(f"{NS}ListRecords/{NS}resumptionToken").text
        col = seeded_repo.node_by_set_spec("ve:ula:wcd-raw")
        late = seeded_repo.add_item(col.id, make_record(99), make_files(99))
        seen = [h.find(NS + "identifier").text
                for h in first.iter(NS + "header")]
        args = {"verb": "ListRecords", "resumptionToken": token}
        while True:
            root = validate_oai_response(populated_server.handle(args))
            body = root.find(NS + "ListRecords")
            seen += [h.find(NS + "identifier").text for h in body.iter(NS + "header")]
            tok = body.find(NS + "resumptionToken")
            if tok is None or not (tok.text or "").strip():
                break
            args = {"verb": "ListRecords", "resumptionToken": tok.text}
        assert f"oai:lago-dr.example.org:{late.pid}" in seen
        assert len(seen) == len(set(seen))

    def test_complete_list_size_attribute(self, populated_server):
        root = validate_oai_response(populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc"}))
        token = root.find(f"{NS}ListRecords/{NS}resumptionToken")
        assert token.get("completeListSize") == "8"
        assert token.get("cursor") == "0"

    def test_token_roundtrip(self):
        token = ResumptionToken(parse_utc("2008-05-01T10:00:00Z"), 42, "oai_dc",
                                parse_utc("2008-01-01T00:00:00Z"), None, "ve",
                                parse_utc("2008-06-01T00:00:00Z"), 120, 100)
        assert decode_token(token.encode()) == token

    def test_day_granularity_accepted(self, populated_server):
        response = populated_server.handle(
            {"verb": "ListRecords", "metadataPrefix": "oai_dc",
             "from": "2000-01-01", "until": "2099-12-31"})
        root = validate_oai_response(response)
        assert root.find(NS + "ListRecords") is not None


class TestSchemaConformance:
    def test_every_response_kind_validates(self, populated_server, seeded_repo):
        seeded_repo.withdraw_item("lago/4")
        requests = [
            {"verb": "Identify"},
            {"verb": "ListSets"},
            {"verb": "ListMetadataFormats"},
            {"verb": "GetRecord", "metadataPrefix": "oai_dc",
             "identifier": "oai:lago-dr.example.org:lago/1"},
            {"verb": "GetRecord", "metadataPrefix": "lago",
             "identifier": "oai:lago-dr.example.org:lago/4"},
            {"verb": "ListRecords", "metadataPrefix": "oai_dc"},
            {"verb": "ListRecords", "metadataPrefix": "lago"},
            {"verb": "ListIdentifiers", "metadataPrefix": "oai_dc", "set": "bo"},
            {"verb": "Nonsense"},
            {"verb": "GetRecord", "metadataPrefix": "oai_dc",
             "identifier": "oai:lago-dr.example.org:lago/999"},
            {"verb": "ListRecords", "metadataPrefix": "oai_dc",
             "from": "9999-01-01"},
            {"verb": "ListRecords"},
        ]
        for args in requests:
            validate_oai_response(populated_server.handle(args))
