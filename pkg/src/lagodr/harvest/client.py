"""Federation client: harvests peer repositories over OAI-PMH and feeds the
cross-site aggregate index behind meta-search.

The per-peer watermark is the peer's own responseDate (first page of the
harvest), so clock skew between sites can only cause overlap re-fetch, which
the idempotent upsert absorbs.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx

from ..errors import (
    BadToken,
    DuplicatePeer,
    PeerUnreachable,
    ProtocolError,
    UnknownPeer,
)
from ..metadata import MetadataRecord, parse_oai_dc
from ..metadata.serialize import OAI_DC_NS
from ..oai.conformance import validate_oai_response
from ..oai.server import OAI_NS
from ..util import parse_utc

_SCHEMA = """
CREATE TABLE IF NOT EXISTS peers (
    name TEXT PRIMARY KEY,
    base_url TEXT NOT NULL,
    watermark TEXT,
    status TEXT NOT NULL DEFAULT 'never-synced'
);
CREATE TABLE IF NOT EXISTS aggregate (
    peer TEXT NOT NULL,
    identifier TEXT NOT NULL,
    datestamp TEXT NOT NULL,
    deleted INTEGER NOT NULL,
    dc_json TEXT,
    setspecs_json TEXT NOT NULL,
    PRIMARY KEY (peer, identifier)
);
"""

RETRIES = 3
BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 4.0


@dataclass(frozen=True)
class PeerSite:
    name: str
    base_url: str
    watermark: Optional[str]
    status: str


@dataclass
class HarvestReport:
    peer: str
    mode: str
    fetched: int = 0
    upserted: int = 0
    deleted: int = 0
    pages: int = 0


@dataclass(frozen=True)
class AggregateEntry:
    peer: str
    identifier: str
    datestamp: str
    deleted: bool
    dc: Optional[dict]
    set_specs: tuple


def _record_to_dc_dict(record: MetadataRecord) -> dict:
    out: dict = {}
    for f in record:
        out.setdefault(f.element, []).append(f.value)
    return out


class Harvester:
    def __init__(self, db_path: str | Path, transport: httpx.BaseTransport = None,
                 sleep=time.sleep):
        self.db = sqlite3.connect(str(db_path), check_same_thread=False)
        self.lock = threading.RLock()
        with self.lock, self.db:
            self.db.executescript(_SCHEMA)
        self._transport = transport
        self._sleep = sleep
        self._peer_locks: dict = {}

    def close(self):
        self.db.close()

    # --- peer registry ---

    def register_peer(self, name: str, base_url: str) -> PeerSite:
        httpx.URL(base_url)  # syntactic check
        with self.lock, self.db:
            if self.db.execute("SELECT 1 FROM peers WHERE name = ?", (name,)).fetchone():
                raise DuplicatePeer(name)
            self.db.execute(
                "INSERT INTO peers (name, base_url) VALUES (?,?)", (name, base_url)
            )
        return PeerSite(name, base_url, None, "never-synced")

    def load_peers_file(self, path: str | Path) -> int:
        count = 0
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            name, _, base_url = line.partition("\t")
            self.register_peer(name.strip(), base_url.strip())
            count += 1
        return count

    def get_peer(self, name: str) -> PeerSite:
        row = self.db.execute(
            "SELECT name, base_url, watermark, status FROM peers WHERE name = ?",
            (name,),
        ).fetchone()
        if not row:
            raise UnknownPeer(name)
        return PeerSite(*row)

    def peers(self) -> list:
        rows = self.db.execute(
            "SELECT name, base_url, watermark, status FROM peers ORDER BY name"
        ).fetchall()
        return [PeerSite(*r) for r in rows]

    # --- transport ---

    def _fetch(self, base_url: str, params: dict) -> bytes:
        last_error = None
        for attempt in range(RETRIES + 1):
            if attempt:
                self._sleep(BACKOFF_BASE * BACKOFF_FACTOR ** (attempt - 1))
            try:
                with httpx.Client(transport=self._transport, timeout=30.0) as client:
                    response = client.get(base_url, params=params)
                response.raise_for_status()
                return response.content
            except httpx.HTTPError as exc:
                last_error = exc
        raise PeerUnreachable(f"{base_url}: {last_error}")

    # --- harvesting ---

    def harvest(self, name: str, mode: str = "incremental") -> HarvestReport:
        peer = self.get_peer(name)
        if mode == "incremental" and peer.watermark is None:
            mode = "full"
        lock = self._peer_locks.setdefault(name, threading.Lock())
        with lock:
            return self._harvest_locked(peer, mode)

    def _harvest_locked(self, peer: PeerSite, mode: str) -> HarvestReport:
        report = HarvestReport(peer.name, mode)
        params = {"verb": "ListRecords", "metadataPrefix": "oai_dc"}
        if mode == "incremental":
            params["from"] = peer.watermark
        first_response_date = None

        while True:
            data = self._fetch(peer.base_url, params)
            report.pages += 1
            try:
                root = validate_oai_response(data)
            except ProtocolError as exc:
                self._set_status(peer.name, "failing")
                raise ProtocolError(str(exc), page=report.pages)

            if first_response_date is None:
                first_response_date = root.find(f"{{{OAI_NS}}}responseDate").text

            errors = root.findall(f"{{{OAI_NS}}}error")
            if errors:
                code = errors[0].get("code")
                if code == "noRecordsMatch":
                    break
                self._set_status(peer.name, "failing")
                if code == "badResumptionToken":
                    raise BadToken(f"peer rejected our token: {errors[0].text}")
                raise ProtocolError(
                    f"peer error {code}: {errors[0].text}", page=report.pages
                )

            body = root.find(f"{{{OAI_NS}}}ListRecords")
            for record in body.findall(f"{{{OAI_NS}}}record"):
                self._apply_record(peer.name, record, report)

            token = body.find(f"{{{OAI_NS}}}resumptionToken")
            if token is None or not (token.text or "").strip():
                break
            params = {"verb": "ListRecords", "resumptionToken": token.text.strip()}

        self._finish(peer, first_response_date)
        return report

    def _apply_record(self, peer: str, record: ET.Element, report: HarvestReport):
        header = record.find(f"{{{OAI_NS}}}header")
        identifier = header.find(f"{{{OAI_NS}}}identifier").text
        datestamp = header.find(f"{{{OAI_NS}}}datestamp").text
        deleted = header.get("status") == "deleted"
        set_specs = [s.text for s in header.findall(f"{{{OAI_NS}}}setSpec")]
        dc_json = None
        if not deleted:
            payload = record.find(f"{{{OAI_NS}}}metadata/{{{OAI_DC_NS}}}dc")
            dc_json = json.dumps(_record_to_dc_dict(parse_oai_dc(payload)))
        report.fetched += 1

        with self.lock, self.db:
            row = self.db.execute(
                "SELECT datestamp FROM aggregate WHERE peer = ? AND identifier = ?",
                (peer, identifier),
            ).fetchone()
            if row and row[0] > datestamp:
                return  # newest datestamp wins
            self.db.execute(
                "INSERT INTO aggregate (peer, identifier, datestamp, deleted, "
                "dc_json, setspecs_json) VALUES (?,?,?,?,?,?) "
                "ON CONFLICT (peer, identifier) DO UPDATE SET datestamp=excluded.datestamp, "
                "deleted=excluded.deleted, dc_json=excluded.dc_json, "
                "setspecs_json=excluded.setspecs_json",
                (peer, identifier, datestamp, int(deleted), dc_json,
                 json.dumps(set_specs)),
            )
        if deleted:
            report.deleted += 1
        else:
            report.upserted += 1

    def _set_status(self, name: str, status: str):
        with self.lock, self.db:
            self.db.execute("UPDATE peers SET status = ? WHERE name = ?", (status, name))

    def _finish(self, peer: PeerSite, response_date: Optional[str]):
        with self.lock, self.db:
            watermark = peer.watermark
            if response_date and (watermark is None or response_date > watermark):
                watermark = response_date
            self.db.execute(
                "UPDATE peers SET watermark = ?, status = 'synced' WHERE name = ?",
                (watermark, peer.name),
            )

    # --- aggregate ---

    def entries(self, peer: str = None) -> list:
        sql = ("SELECT peer, identifier, datestamp, deleted, dc_json, setspecs_json "
               "FROM aggregate")
        params: tuple = ()
        if peer is not None:
            sql += " WHERE peer = ?"
            params = (peer,)
        out = []
        for row in self.db.execute(sql + " ORDER BY peer, identifier", params):
            out.append(AggregateEntry(
                row[0], row[1], row[2], bool(row[3]),
                json.loads(row[4]) if row[4] else None,
                tuple(json.loads(row[5])),
            ))
        return out

    def mirror_multiset(self, peer: str) -> set:
        return {(e.identifier, e.datestamp, e.deleted) for e in self.entries(peer)}

    def aggregate_search(self, query: str, peer: str = None,
                         country_set: str = None, datatype: str = None) -> list:
        terms = [t.lower() for t in (query or "").split() if t]
        results = []
        for entry in self.entries(peer):
            if entry.deleted or entry.dc is None:
                continue
            if country_set is not None:
                prefix_parts = country_set.split(":")
                if not any(
                    spec.split(":")[: len(prefix_parts)] == prefix_parts
                    for spec in entry.set_specs
                ):
                    continue
            if datatype is not None and datatype not in entry.dc.get("type", []):
                continue
            haystack = " ".join(
                v for key in ("title", "creator", "description")
                for v in entry.dc.get(key, [])
            ).lower()
            if all(t in haystack for t in terms):
                results.append(entry)
        results.sort(key=lambda e: (e.datestamp, e.identifier), reverse=True)
        return results
