import random

import httpx
import pytest

from lagodr.errors import (
    BadToken,
    DuplicatePeer,
    PeerUnreachable,
    ProtocolError,
    UnknownPeer,
)
from lagodr.harvest import Harvester
from lagodr.oai import OaiConfig, OaiServer
from lagodr.storage import Repository

from conftest import make_files, make_record, oai_transport, seed_hierarchy

PEER_ID = "peer.example.net"


@pytest.fixture
def peer_repo(tmp_path):
    repo = Repository(tmp_path / "peer-data")
    seed_hierarchy(repo)
    yield repo
    repo.close()


@pytest.fixture
def peer_server(peer_repo):
    return OaiServer(peer_repo, OaiConfig(repo_id=PEER_ID, page_size=7))


def make_harvester(tmp_path, server, sleep=None):
    h = Harvester(tmp_path / "harvester.db", transport=oai_transport(server),
                  sleep=sleep or (lambda s: None))
    h.register_peer("peer", "http://peer.example.net/oai")
    return h


def populate(repo, n, offset=0, spec="ve:ula:wcd-raw"):
    col = repo.node_by_set_spec(spec)
    return [repo.add_item(col.id, make_record(offset + i), make_files(offset + i))
            for i in range(n)]


def listing_oracle(repo, repo_id=PEER_ID):
    """What a correct mirror must hold, straight from the item table."""
    return {
        (f"oai:{repo_id}:{i.pid}",
         i.datestamp.strftime("%Y-%m-%dT%H:%M:%SZ"), i.withdrawn)
        for i in repo.list_items(include_withdrawn=True)
    }


class TestPeerRegistry:
    def test_register_and_list(self, tmp_path):
        h = Harvester(tmp_path / "h.db")
        h.register_peer("b", "http://b.example/oai")
        h.register_peer("a", "http://a.example/oai")
        assert [p.name for p in h.peers()] == ["a", "b"]
        assert h.get_peer("a").status == "never-synced"

    def test_duplicate(self, tmp_path):
        h = Harvester(tmp_path / "h.db")
        h.register_peer("a", "http://a.example/oai")
        with pytest.raises(DuplicatePeer):
            h.register_peer("a", "http://other.example/oai")

    def test_unknown(self, tmp_path):
        h = Harvester(tmp_path / "h.db")
        with pytest.raises(UnknownPeer):
            h.harvest("ghost")

    def test_peers_file(self, tmp_path):
        f = tmp_path / "peers.tsv"
        f.write_text("# comment\nsite-a\thttp://a.example/oai\n"
                     "site-b\thttp://b.example/oai\n")
        h = Harvester(tmp_path / "h.db")
        assert h.load_peers_file(f) == 2
        assert h.get_peer("site-b").base_url == "http://b.example/oai"


class TestFullHarvest:
    def test_mirror_matches_oracle(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 20)
        peer_repo.withdraw_item("lago/5")
        h = make_harvester(tmp_path, peer_server)
        report = h.harvest("peer", mode="full")
        assert report.fetched == 20
        assert report.pages == 3  # 20 records, page size 7
        assert h.mirror_multiset("peer") == listing_oracle(peer_repo)
        assert h.get_peer("peer").status == "synced"
        assert h.get_peer("peer").watermark is not None

    def test_empty_peer(self, tmp_path, peer_server):
        h = make_harvester(tmp_path, peer_server)
        report = h.harvest("peer", mode="full")
        assert report.fetched == 0
        assert h.get_peer("peer").status == "synced"

    def test_idempotent(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 10)
        h = make_harvester(tmp_path, peer_server)
        h.harvest("peer", mode="full")
        before = h.mirror_multiset("peer")
        h.harvest("peer", mode="full")
        assert h.mirror_multiset("peer") == before
        assert len(h.entries("peer")) == 10

    def test_dc_payload_captured(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 1)
        h = make_harvester(tmp_path, peer_server)
        h.harvest("peer", mode="full")
        entry = h.entries("peer")[0]
        assert entry.dc["title"] == ["run-000"]
        assert entry.set_specs == ("ve", "ve:ula", "ve:ula:wcd-raw")

    def test_deleted_entry_has_no_payload(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 2)
        peer_repo.withdraw_item("lago/1")
        h = make_harvester(tmp_path, peer_server)
        report = h.harvest("peer", mode="full")
        assert report.deleted == 1 and report.upserted == 1
        deleted = [e for e in h.entries("peer") if e.deleted]
        assert len(deleted) == 1 and deleted[0].dc is None


class TestIncrementalHarvest:
    def test_without_watermark_falls_back_to_full(self, tmp_path, peer_repo,
                                                  peer_server):
        populate(peer_repo, 5)
        h = make_harvester(tmp_path, peer_server)
        report = h.harvest("peer")  # default incremental, no watermark yet
        assert report.mode == "full"
        assert len(h.entries("peer")) == 5

    def test_picks_up_mutations(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 8)
        h = make_harvester(tmp_path, peer_server)
        h.harvest("peer", mode="full")
        populate(peer_repo, 3, offset=100)
        peer_repo.withdraw_item("lago/2")
        peer_repo.update_metadata("lago/3", make_record(3, title="revised"))
        h.harvest("peer", mode="incremental")
        assert h.mirror_multiset("peer") == listing_oracle(peer_repo)
        revised = [e for e in h.entries("peer")
                   if e.identifier.endswith(":lago/3")][0]
        assert revised.dc["title"] == ["revised"]

    def test_watermark_monotone(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 1)
        h = make_harvester(tmp_path, peer_server)
        h.harvest("peer", mode="full")
        w1 = h.get_peer("peer").watermark
        h.harvest("peer", mode="incremental")
        assert h.get_peer("peer").watermark >= w1

    def test_randomized_incremental_equals_fresh_full(self, tmp_path, peer_repo,
                                                      peer_server):
        rng = random.Random(7)
        populate(peer_repo, 15)
        incremental = make_harvester(tmp_path, peer_server)
        incremental.harvest("peer", mode="full")
        next_i = 200
        for round_no in range(4):
            for _ in range(rng.randint(3, 8)):
                op = rng.random()
                live = [i.pid for i in peer_repo.list_items()
                        if not i.withdrawn]
                if op < 0.5 or not live:
                    populate(peer_repo, 1, offset=next_i)
                    next_i += 1
                elif op < 0.8:
                    peer_repo.update_metadata(
                        rng.choice(live), make_record(next_i, title=f"rev-{next_i}"))
                    next_i += 1
                else:
                    peer_repo.withdraw_item(rng.choice(live))
            incremental.harvest("peer", mode="incremental")
            fresh = Harvester(tmp_path / f"fresh-{round_no}.db",
                              transport=oai_transport(peer_server),
                              sleep=lambda s: None)
            fresh.register_peer("peer", "http://peer.example.net/oai")
            fresh.harvest("peer", mode="full")
            assert (incremental.mirror_multiset("peer")
                    == fresh.mirror_multiset("peer")
                    == listing_oracle(peer_repo))
            fresh.close()


class FlakyTransport(httpx.BaseTransport):
    """Fails the first `failures` requests, then delegates."""

    def __init__(self, inner: httpx.BaseTransport, failures: int,
                 status: int = None):
        self.inner = inner
        self.failures = failures
        self.status = status
        self.attempts = 0

    def handle_request(self, request):
        self.attempts += 1
        if self.attempts <= self.failures:
            if self.status:
                return httpx.Response(self.status, content=b"unavailable")
            raise httpx.ConnectError("connection refused", request=request)
        return self.inner.handle_request(request)


class TestFaults:
    def test_retries_then_succeeds(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 3)
        flaky = FlakyTransport(oai_transport(peer_server), failures=3)
        delays = []
        h = Harvester(tmp_path / "h.db", transport=flaky, sleep=delays.append)
        h.register_peer("peer", "http://peer.example.net/oai")
        h.harvest("peer", mode="full")
        assert len(h.entries("peer")) == 3
        assert delays[:3] == [1.0, 4.0, 16.0]

    def test_gives_up_after_retries(self, tmp_path, peer_repo, peer_server):
        flaky = FlakyTransport(oai_transport(peer_server), failures=99)
        delays = []
        h = Harvester(tmp_path / "h.db", transport=flaky, sleep=delays.append)
        h.register_peer("peer", "http://peer.example.net/oai")
        with pytest.raises(PeerUnreachable):
            h.harvest("peer", mode="full")
        assert flaky.attempts == 4  # initial try + 3 retries
        assert delays == [1.0, 4.0, 16.0]

    def test_http_error_status_retried(self, tmp_path, peer_repo, peer_server):
        flaky = FlakyTransport(oai_transport(peer_server), failures=99, status=503)
        h = Harvester(tmp_path / "h.db", transport=flaky, sleep=lambda s: None)
        h.register_peer("peer", "http://peer.example.net/oai")
        with pytest.raises(PeerUnreachable):
            h.harvest("peer", mode="full")

    def test_malformed_page_flags_peer(self, tmp_path):
        def handler(request):
            return httpx.Response(200, content=b"<html>not oai</html>")

        h = Harvester(tmp_path / "h.db",
                      transport=httpx.MockTransport(handler),
                      sleep=lambda s: None)
        h.register_peer("peer", "http://peer.example.net/oai")
        with pytest.raises(ProtocolError) as exc:
            h.harvest("peer", mode="full")
        assert exc.value.page == 1
        assert h.get_peer("peer").status == "failing"

    def test_peer_rejects_token(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 10)
        real = oai_transport(peer_server)

        def handler(request):
            params = dict(httpx.QueryParams(request.url.query))
            if "resumptionToken" in params:
                params["resumptionToken"] = "garbage"
                request = httpx.Request(
                    "GET", httpx.URL("http://peer.example.net/oai",
                                     params=params))
            return real.handler(request)

        h = Harvester(tmp_path / "h.db",
                      transport=httpx.MockTransport(handler),
                      sleep=lambda s: None)
        h.register_peer("peer", "http://peer.example.net/oai")
        with pytest.raises(BadToken):
            h.harvest("peer", mode="full")
        assert h.get_peer("peer").status == "failing"


class TestAggregateSearch:
    @pytest.fixture
    def filled(self, tmp_path, peer_repo, peer_server):
        populate(peer_repo, 3, spec="ve:ula:wcd-raw")
        populate(peer_repo, 2, offset=10, spec="bo:umsa:simulated")
        peer_repo.withdraw_item("lago/2")
        h = make_harvester(tmp_path, peer_server)
        h.harvest("peer", mode="full")
        return h

    def test_text_terms(self, filled):
        got = filled.aggregate_search("run-011")
        assert [e.identifier for e in got] == [f"oai:{PEER_ID}:lago/5"]

    def test_deleted_excluded(self, filled):
        assert all(not e.deleted for e in filled.aggregate_search(""))

    def test_country_facet(self, filled):
        got = filled.aggregate_search("", country_set="bo")
        assert {e.identifier for e in got} == {
            f"oai:{PEER_ID}:lago/4", f"oai:{PEER_ID}:lago/5"}

    def test_country_facet_is_componentwise(self, filled):
        # "b" must not match the "bo" component by string prefix
        assert filled.aggregate_search("", country_set="b") == []

    def test_newest_first(self, filled):
        got = filled.aggregate_search("")
        keys = [(e.datestamp, e.identifier) for e in got]
        assert keys == sorted(keys, reverse=True)
