"""Deposit workflow: member authentication, per-community submission grants,
single deposits and bulk loading from a manifest tree."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import Forbidden, LagodrError, Unauthorized, Unreadable
from .metadata import MetadataRecord
from .storage.export import read_export
from .storage.repository import FileInput, Item, Repository


def _hash_token(token: str) -> str:
    return hashlib.sha256(token.encode()).hexdigest()


@dataclass(frozen=True)
class Member:
    id: int
    name: str
    email: str
    grants: frozenset  # community node ids where the member may submit
    admin: bool = False


@dataclass
class BulkReport:
    attempted: int = 0
    succeeded: int = 0
    failed: list = field(default_factory=list)  # (entry path, error code, message)
    pids: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "succeeded": self.succeeded,
            "failed": [
                {"entry": e, "code": c, "message": m} for e, c, m in self.failed
            ],
        }




class MemberStore:
    def __init__(self, repo: Repository):
        self.repo = repo

    def add_member(self, name, email, token, community_slugs=(), admin=False) -> Member:
        repo = self.repo
        grants = set()
        for slug in community_slugs:
            grants.add(repo.node_by_set_spec(slug).id)
        with repo.lock, repo.db:
            cur = repo.db.execute(
                "INSERT INTO members (name, email, token_hash, admin) VALUES (?,?,?,?)",
                (name, email, _hash_token(token), int(admin)),
            )
            member_id = cur.lastrowid
            for community in grants:
                repo.db.execute(
                    "INSERT INTO member_grants (member, community) VALUES (?,?)",
                    (member_id, community),
                )
        return Member(member_id, name, email, frozenset(grants), admin)

    def authenticate(self, token: str) -> Member:
        if not token:
            raise Unauthorized("missing token")
        row = self.repo.db.execute(
            "SELECT id, name, email, admin FROM members WHERE token_hash = ?",
            (_hash_token(token),),
        ).fetchone()
        if not row:
            raise Unauthorized("unknown token")
        grants = frozenset(
            r[0]
            for r in self.repo.db.execute(
                "SELECT community FROM member_grants WHERE member = ?", (row[0],)
            ).fetchall()
        )
        return Member(row[0], row[1], row[2], grants, bool(row[3]))

    def load_members_file(self, path: str | Path) -> int:
        """`members.tsv`: name, email, token, comma-joined community slugs,
        optional trailing `admin` marker."""
        path = Path(path)
        if not path.is_file():
            raise Unreadable(f"no members file at {path}")
        count = 0
        for raw in path.read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 4:
                raise Unreadable(f"malformed members line: {raw!r}")
            name, email, token, slugs = parts[:4]
            admin = len(parts) > 4 and parts[4].strip() == "admin"
            communities = [s for s in slugs.split(",") if s]
            self.add_member(name, email, token, communities, admin)
            count += 1
        return count


class IngestService:
    def __init__(self, repo: Repository, members: MemberStore, on_deposit=None):
        self.repo = repo
        self.members = members
        # discovery callback fired after each successful deposit
        self.on_deposit = on_deposit or (lambda item: None)

    def deposit(self, member: Member, collection_id: int, record: MetadataRecord,
                files: list) -> Item:
        collection = self.repo.get_node(collection_id)
        community = self.repo.root_community(collection.id)
        if community.id not in member.grants:
            raise Forbidden(
                f"member {member.name!r} has no grant for community {community.slug!r}"
            )
        item = self.repo.add_item(collection_id, record, files)
        self.on_deposit(item)
        return item

    def bulk_load(self, member: Member, root: str | Path) -> BulkReport:
        """Entries processed independently in manifest order; one failure
        never aborts the batch."""
        root = Path(root)
        entries_file = root / "entries.tsv"
        if not root.is_dir() or not entries_file.is_file():
            raise Unreadable(f"no bulk manifest at {root}")
        report = BulkReport()
        for raw in entries_file.read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            report.attempted += 1
            try:
                rel_dir, _, set_spec = line.partition("\t")
                if not set_spec:
                    raise Unreadable(f"malformed entry line: {raw!r}")
                collection = self.repo.node_by_set_spec(set_spec.strip())
                record, files = read_export(root / rel_dir)
                item = self.deposit(member, collection.id, record, files)
                report.succeeded += 1
                report.pids.append(item.pid)
            except LagodrError as exc:
                report.failed.append((line.partition("\t")[0], exc.code, str(exc)))
        return report
