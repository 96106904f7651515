import httpx
import pytest

from lagodr.metadata import MetadataRecord
from lagodr.oai import OaiConfig, OaiServer
from lagodr.storage import FileInput, Repository

# the three detector sites with one institution each and the three
# detector-data collection types per institution
LAGO_HIERARCHY = [
    ("community", "Bolivia", "bo", None, None),
    ("subcommunity", "UMSA", "umsa", "bo", None),
    ("collection", "Calibration", "calibration", "bo:umsa", "calibration"),
    ("collection", "WCD raw", "wcd-raw", "bo:umsa", "wcd-raw"),
    ("collection", "Simulated", "simulated", "bo:umsa", "simulated"),
    ("community", "Venezuela", "ve", None, None),
    ("subcommunity", "ULA", "ula", "ve", None),
    ("collection", "Calibration", "calibration", "ve:ula", "calibration"),
    ("collection", "WCD raw", "wcd-raw", "ve:ula", "wcd-raw"),
    ("collection", "Simulated", "simulated", "ve:ula", "simulated"),
    ("community", "Mexico", "mx", None, None),
    ("subcommunity", "INAOE", "inaoe", "mx", None),
    ("collection", "Calibration", "calibration", "mx:inaoe", "calibration"),
    ("collection", "WCD raw", "wcd-raw", "mx:inaoe", "wcd-raw"),
    ("collection", "Simulated", "simulated", "mx:inaoe", "simulated"),
]


def seed_hierarchy(repo: Repository) -> dict:
    nodes = {}
    for kind, name, slug, parent_spec, datatype in LAGO_HIERARCHY:
        parent = nodes[parent_spec].id if parent_spec else None
        spec = f"{parent_spec}:{slug}" if parent_spec else slug
        nodes[spec] = repo.create_node(kind, name, slug, parent, datatype)
    return nodes


def make_record(i=0, datatype="wcd-raw", title=None, responsible="Ana Perez",
                start="2008-05-01T10:00:00Z", end="2008-05-02T10:00:00Z"):
    r = MetadataRecord()
    r.add("dc", "title", value=title or f"run-{i:03d}")
    if datatype != "document":
        r.add("lago", "responsible", value=responsible)
        r.add("lago", "contact", value="ana@ula.ve")
        r.add("lago", "datatype", value=datatype)
    if datatype == "wcd-raw":
        r.add("lago", "capture", "start", start)
        r.add("lago", "capture", "end", end)
    return r


def make_files(i=0):
    return [FileInput(f"payload-{i}".encode(), "data", "CC-BY", f"run-{i:03d}.dat")]


@pytest.fixture
def repo(tmp_path):
    r = Repository(tmp_path / "data")
    yield r
    r.close()


@pytest.fixture
def seeded_repo(repo):
    seed_hierarchy(repo)
    return repo


def oai_transport(server: OaiServer) -> httpx.MockTransport:
    """In-process HTTP transport answering OAI requests from `server`."""

    def handler(request: httpx.Request) -> httpx.Response:
        params = dict(httpx.QueryParams(request.url.query))
        return httpx.Response(200, content=server.handle(params),
                              headers={"content-type": "text/xml; charset=utf-8"})

    return httpx.MockTransport(handler)


@pytest.fixture
def oai_server(seeded_repo):
    return OaiServer(seeded_repo, OaiConfig(page_size=100))
