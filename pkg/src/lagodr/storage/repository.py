"""The repository core: hierarchy, items, bitstreams, pids, datestamps.

Backed by a single sqlite store plus the content-addressed blob area.
All writes happen under one lock and inside sqlite transactions, so readers
never observe partially written items and an interrupted add_item leaves at
worst orphan blobs, never a dangling item.
"""

from __future__ import annotations

import mimetypes
import re
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional

from ..errors import (
    AlreadyWithdrawn,
    BadParentKind,
    DuplicateSlug,
    UnknownNode,
    UnknownPid,
    ValidationFailed,
)
from ..metadata import MetadataField, MetadataRecord, validate_record
from ..util import format_utc, now_utc, parse_utc
from .blobstore import BlobStore, sha256_hex

KINDS = ("community", "subcommunity", "collection")
ROLES = ("data", "calibration", "graphic", "postprocessed", "other")
CC_LICENSES = (
    "CC-BY", "CC-BY-SA", "CC-BY-NC", "CC-BY-NC-SA", "CC-BY-ND", "CC-BY-NC-ND", "CC0",
)

_SLUG_RE = re.compile(r"^[a-z0-9-]+$")

_SCHEMA = """
CREATE TABLE IF NOT EXISTS nodes (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    kind TEXT NOT NULL,
    name TEXT NOT NULL,
    slug TEXT NOT NULL,
    parent INTEGER,
    datatype TEXT
);
CREATE TABLE IF NOT EXISTS pid_seq (
    id INTEGER PRIMARY KEY CHECK (id = 1),
    next INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS items (
    pid TEXT PRIMARY KEY,
    num INTEGER NOT NULL,
    collection INTEGER NOT NULL,
    datestamp TEXT NOT NULL,
    withdrawn INTEGER NOT NULL DEFAULT 0
);
CREATE INDEX IF NOT EXISTS idx_items_collection ON items(collection);
CREATE INDEX IF NOT EXISTS idx_items_datestamp ON items(datestamp, num);
CREATE TABLE IF NOT EXISTS fields (
    pid TEXT NOT NULL,
    idx INTEGER NOT NULL,
    schema TEXT NOT NULL,
    element TEXT NOT NULL,
    qualifier TEXT,
    value TEXT NOT NULL,
    lang TEXT
);
CREATE INDEX IF NOT EXISTS idx_fields_pid ON fields(pid);
CREATE TABLE IF NOT EXISTS bitstreams (
    pid TEXT NOT NULL,
    seq INTEGER NOT NULL,
    filename TEXT NOT NULL,
    role TEXT NOT NULL,
    media_type TEXT NOT NULL,
    size INTEGER NOT NULL,
    sha256 TEXT NOT NULL,
    license TEXT,
    PRIMARY KEY (pid, seq)
);
CREATE TABLE IF NOT EXISTS members (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL,
    email TEXT NOT NULL,
    token_hash TEXT NOT NULL UNIQUE,
    admin INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS member_grants (
    member INTEGER NOT NULL,
    community INTEGER NOT NULL,
    UNIQUE (member, community)
);
CREATE TABLE IF NOT EXISTS subscriptions (
    member INTEGER NOT NULL,
    collection INTEGER NOT NULL,
    UNIQUE (member, collection)
);
"""


@dataclass(frozen=True)
class HierarchyNode:
    id: int
    kind: str
    name: str
    slug: str
    parent: Optional[int]
    datatype: Optional[str]


@dataclass(frozen=True)
class Bitstream:
    seq: int
    filename: str
    role: str
    media_type: str
    size: int
    sha256: str
    license: Optional[str] = None


@dataclass
class Item:
    pid: str
    collection: int
    record: MetadataRecord
    datestamp: datetime
    withdrawn: bool
    bitstreams: list = field(default_factory=list)

    @property
    def num(self) -> int:
        return int(self.pid.split("/", 1)[1])


@dataclass(frozen=True)
class FileInput:
    """One file to attach at deposit time; source is a path or raw bytes."""
    source: object
    role: str = "data"
    license: Optional[str] = None
    filename: Optional[str] = None
    media_type: Optional[str] = None

    def read(self) -> bytes:
        if isinstance(self.source, (bytes, bytearray)):
            return bytes(self.source)
        return Path(self.source).read_bytes()

    def effective_filename(self) -> str:
        if self.filename:
            return self.filename
        if isinstance(self.source, (bytes, bytearray)):
            return "file.bin"
        return Path(self.source).name


class Repository:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        (self.data_dir / "store").mkdir(parents=True, exist_ok=True)
        self.blobs = BlobStore(self.data_dir / "assetstore")
        self.db = sqlite3.connect(
            self.data_dir / "store" / "repository.db", check_same_thread=False
        )
        self.db.execute("PRAGMA journal_mode=WAL")
        self.db.execute("PRAGMA foreign_keys=ON")
        self.lock = threading.RLock()
        with self.lock, self.db:
            self.db.executescript(_SCHEMA)
            self.db.execute("INSERT OR IGNORE INTO pid_seq (id, next) VALUES (1, 1)")
        # test seam: called at named points inside add_item
        self.crash_hook = lambda point: None

    def close(self):
        self.db.close()

    # --- hierarchy ---

    def create_node(self, kind, name, slug, parent=None, datatype=None) -> HierarchyNode:
        if kind not in KINDS:
            raise BadParentKind(f"unknown node kind {kind!r}")
        if not _SLUG_RE.match(slug):
            raise DuplicateSlug(f"malformed slug {slug!r}")
        parent_node = self.get_node(parent) if parent is not None else None
        if kind == "community" and parent_node is not None:
            raise BadParentKind("a community has no parent")
        if kind == "subcommunity" and (parent_node is None or parent_node.kind != "community"):
            raise BadParentKind("a subcommunity's parent must be a community")
        if kind == "collection":
            if parent_node is None or parent_node.kind != "subcommunity":
                raise BadParentKind("a collection's parent must be a subcommunity")
            from ..metadata import DATA_TYPES
            if datatype not in DATA_TYPES:
                raise BadParentKind(f"collection datatype must be one of {DATA_TYPES}")
        else:
            datatype = None
        with self.lock, self.db:
            row = self.db.execute(
                "SELECT 1 FROM nodes WHERE slug = ? AND parent IS ?",
                (slug, parent),
            ).fetchone()
            if row:
                raise DuplicateSlug(f"slug {slug!r} already used among siblings")
            cur = self.db.execute(
                "INSERT INTO nodes (kind, name, slug, parent, datatype) VALUES (?,?,?,?,?)",
                (kind, name, slug, parent, datatype),
            )
            return HierarchyNode(cur.lastrowid, kind, name, slug, parent, datatype)

    def get_node(self, node_id: int) -> HierarchyNode:
        row = self.db.execute(
            "SELECT id, kind, name, slug, parent, datatype FROM nodes WHERE id = ?",
            (node_id,),
        ).fetchone()
        if not row:
            raise UnknownNode(f"no node {node_id}")
        return HierarchyNode(*row)

    def all_nodes(self) -> list:
        rows = self.db.execute(
            "SELECT id, kind, name, slug, parent, datatype FROM nodes ORDER BY id"
        ).fetchall()
        return [HierarchyNode(*r) for r in rows]

    def children(self, node_id: Optional[int]) -> list:
        rows = self.db.execute(
            "SELECT id, kind, name, slug, parent, datatype FROM nodes "
            "WHERE parent IS ? ORDER BY slug",
            (node_id,),
        ).fetchall()
        return [HierarchyNode(*r) for r in rows]

    def communities(self) -> list:
        return self.children(None)

    def set_spec(self, node_id: int) -> str:
        parts = []
        node = self.get_node(node_id)
        while node is not None:
            parts.append(node.slug)
            node = self.get_node(node.parent) if node.parent is not None else None
        return ":".join(reversed(parts))

    def node_by_set_spec(self, spec: str) -> HierarchyNode:
        node = None
        parent = None
        for slug in spec.split(":"):
            row = self.db.execute(
                "SELECT id, kind, name, slug, parent, datatype FROM nodes "
                "WHERE slug = ? AND parent IS ?",
                (slug, parent),
            ).fetchone()
            if not row:
                raise UnknownNode(f"no node for set spec {spec!r}")
            node = HierarchyNode(*row)
            parent = node.id
        if node is None:
            raise UnknownNode("empty set spec")
        return node

    def root_community(self, node_id: int) -> HierarchyNode:
        node = self.get_node(node_id)
        while node.parent is not None:
            node = self.get_node(node.parent)
        return node

    def ancestor_specs(self, collection_id: int) -> list:
        """Set specs from community down to the collection, e.g.
        ["ve", "ve:ula", "ve:ula:wcd-raw"]."""
        spec = self.set_spec(collection_id)
        parts = spec.split(":")
        return [":".join(parts[: i + 1]) for i in range(len(parts))]

    def collections_under(self, spec: str) -> list:
        """Collection ids whose full set spec has `spec` as a path prefix."""
        node = self.node_by_set_spec(spec)
        out = []
        frontier = [node]
        while frontier:
            n = frontier.pop()
            if n.kind == "collection":
                out.append(n.id)
            frontier.extend(self.children(n.id))
        return sorted(out)

    # --- persistent identifiers ---

    def mint_pid(self) -> str:
        with self.lock, self.db:
            (nxt,) = self.db.execute("SELECT next FROM pid_seq WHERE id = 1").fetchone()
            self.db.execute("UPDATE pid_seq SET next = ? WHERE id = 1", (nxt + 1,))
        return f"lago/{nxt}"

    # --- items ---

    def _next_datestamp(self, prev: Optional[datetime]) -> datetime:
        now = now_utc()
        if prev is not None and now <= prev:
            now = prev + timedelta(seconds=1)
        return now

    def add_item(self, collection_id: int, record: MetadataRecord, files: Iterable[FileInput]) -> Item:
        collection = self.get_node(collection_id)
        if collection.kind != "collection":
            raise BadParentKind("items live in collections")
        report = validate_record(record, collection.datatype)
        if not report.ok:
            raise ValidationFailed(report)
        files = list(files)
        if collection.datatype != "document" and not files:
            raise ValidationFailed(
                report, "at least one file is required for detector data types"
            )
        for f in files:
            if f.role not in ROLES:
                raise ValidationFailed(report, f"unknown bitstream role {f.role!r}")
            if f.license is not None and f.license not in CC_LICENSES:
                raise ValidationFailed(report, f"unknown license {f.license!r}")

        self.crash_hook("begin")
        bitstreams = []
        for seq, f in enumerate(files):
            content = f.read()
            address, _ = self.blobs.put(content)
            self.crash_hook(f"blob:{seq}")
            media_type = f.media_type or mimetypes.guess_type(f.effective_filename())[0] \
                or "application/octet-stream"
            bitstreams.append(
                Bitstream(seq, f.effective_filename(), f.role, media_type,
                          len(content), address, f.license)
            )

        pid = self.mint_pid()
        self.crash_hook("minted")
        datestamp = self._next_datestamp(None)
        with self.lock:
            self.crash_hook("pre-commit")
            with self.db:
                self.db.execute(
                    "INSERT INTO items (pid, num, collection, datestamp, withdrawn) "
                    "VALUES (?,?,?,?,0)",
                    (pid, int(pid.split("/")[1]), collection_id, format_utc(datestamp)),
                )
                self._insert_fields(pid, record)
                for b in bitstreams:
                    self.db.execute(
                        "INSERT INTO bitstreams (pid, seq, filename, role, media_type, "
                        "size, sha256, license) VALUES (?,?,?,?,?,?,?,?)",
                        (pid, b.seq, b.filename, b.role, b.media_type, b.size,
                         b.sha256, b.license),
                    )
        self.crash_hook("post-commit")
        return Item(pid, collection_id, record, datestamp, False, bitstreams)

    def _insert_fields(self, pid: str, record: MetadataRecord):
        for idx, f in enumerate(record):
            self.db.execute(
                "INSERT INTO fields (pid, idx, schema, element, qualifier, value, lang) "
                "VALUES (?,?,?,?,?,?,?)",
                (pid, idx, f.schema, f.element, f.qualifier, f.value, f.lang),
            )

    def get_item(self, pid: str) -> Item:
        row = self.db.execute(
            "SELECT pid, collection, datestamp, withdrawn FROM items WHERE pid = ?",
            (pid,),
        ).fetchone()
        if not row:
            raise UnknownPid(f"no item {pid}")
        fields_rows = self.db.execute(
            "SELECT schema, element, qualifier, value, lang FROM fields "
            "WHERE pid = ? ORDER BY idx",
            (pid,),
        ).fetchall()
        record = MetadataRecord(MetadataField(*r) for r in fields_rows)
        bs_rows = self.db.execute(
            "SELECT seq, filename, role, media_type, size, sha256, license "
            "FROM bitstreams WHERE pid = ? ORDER BY seq",
            (pid,),
        ).fetchall()
        return Item(
            row[0], row[1], record, parse_utc(row[2]), bool(row[3]),
            [Bitstream(*r) for r in bs_rows],
        )

    def withdraw_item(self, pid: str) -> Item:
        with self.lock:
            item = self.get_item(pid)
            if item.withdrawn:
                raise AlreadyWithdrawn(pid)
            datestamp = self._next_datestamp(item.datestamp)
            with self.db:
                self.db.execute(
                    "UPDATE items SET withdrawn = 1, datestamp = ? WHERE pid = ?",
                    (format_utc(datestamp), pid),
                )
        return self.get_item(pid)

    def update_metadata(self, pid: str, record: MetadataRecord) -> Item:
        with self.lock:
            item = self.get_item(pid)
            if item.withdrawn:
                raise AlreadyWithdrawn(pid)
            collection = self.get_node(item.collection)
            report = validate_record(record, collection.datatype)
            if not report.ok:
                raise ValidationFailed(report)
            datestamp = self._next_datestamp(item.datestamp)
            with self.db:
                self.db.execute("DELETE FROM fields WHERE pid = ?", (pid,))
                self._insert_fields(pid, record)
                self.db.execute(
                    "UPDATE items SET datestamp = ? WHERE pid = ?",
                    (format_utc(datestamp), pid),
                )
        return self.get_item(pid)

    # --- listing / harvesting support ---

    def list_items(
        self,
        set_spec: Optional[str] = None,
        from_: Optional[datetime] = None,
        until: Optional[datetime] = None,
        after: Optional[tuple] = None,
        limit: Optional[int] = None,
        include_withdrawn: bool = True,
    ) -> list:
        """Items ordered by (datestamp, pid number); filters are inclusive.

        `after` is a (datestamp, num) cursor; only strictly later items return.
        """
        clauses = []
        params: list = []
        if set_spec is not None:
            collections = self.collections_under(set_spec)
            if not collections:
                return []
            clauses.append(f"collection IN ({','.join('?' * len(collections))})")
            params.extend(collections)
        if from_ is not None:
            clauses.append("datestamp >= ?")
            params.append(format_utc(from_))
        if until is not None:
            clauses.append("datestamp <= ?")
            params.append(format_utc(until))
        if after is not None:
            clauses.append("(datestamp > ? OR (datestamp = ? AND num > ?))")
            stamp = format_utc(after[0])
            params.extend([stamp, stamp, after[1]])
        if not include_withdrawn:
            clauses.append("withdrawn = 0")
        where = f"WHERE {' AND '.join(clauses)}" if clauses else ""
        sql = f"SELECT pid FROM items {where} ORDER BY datestamp, num"
        if limit is not None:
            sql += f" LIMIT {int(limit)}"
        rows = self.db.execute(sql, params).fetchall()
        return [self.get_item(r[0]) for r in rows]

    def count_items(self, set_spec=None, from_=None, until=None,
                    include_withdrawn=True) -> int:
        return len(self.list_items(set_spec, from_, until,
                                   include_withdrawn=include_withdrawn))

    def earliest_datestamp(self) -> datetime:
        row = self.db.execute("SELECT MIN(datestamp) FROM items").fetchone()
        if row and row[0]:
            return parse_utc(row[0])
        return parse_utc("1970-01-01T00:00:00Z")

    def pid_exists(self, pid: str) -> bool:
        return bool(self.db.execute("SELECT 1 FROM items WHERE pid = ?", (pid,)).fetchone())

    def integrity_check(self) -> list:
        """Dangling-reference sweep used by the crash-recovery harness.

        Returns a list of problem strings; empty means invariant-clean.
        """
        problems = []
        for (pid,) in self.db.execute("SELECT pid FROM items").fetchall():
            item = self.get_item(pid)
            try:
                node = self.get_node(item.collection)
            except UnknownNode:
                problems.append(f"{pid}: collection missing")
                continue
            if node.kind != "collection":
                problems.append(f"{pid}: owner is not a collection")
            seqs = [b.seq for b in item.bitstreams]
            if seqs != list(range(len(seqs))):
                problems.append(f"{pid}: bitstream seqs not contiguous")
            if node.datatype != "document" and not item.bitstreams:
                problems.append(f"{pid}: no bitstreams")
            for b in item.bitstreams:
                if not self.blobs.has(b.sha256):
                    problems.append(f"{pid}: blob {b.sha256} missing")
        return problems
