"""Subscriptions, the notification/recommendation outbox, and nothing else:
messages are spooled to disk, never sent from here."""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import InvalidEmail, UnknownPid
from ..storage.repository import Item, Repository
from ..util import format_utc, now_utc

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")



@dataclass(frozen=True)
class OutboxMessage:
    to: str
    kind: str  # new-deposit | recommendation
    subject_pid: str
    body: str
    queued_at: str
    path: Path


class Outbox:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def spool(self, to: str, kind: str, subject_pid: str, subject: str,
              body: str) -> OutboxMessage:
        queued_at = format_utc(now_utc()).replace(":", "").replace("-", "")
        with self._lock:
            seq = len(list(self.directory.glob("*.eml"))) + 1
            path = self.directory / f"{queued_at}-{seq:04d}.eml"
            text = (
                f"To: {to}\n"
                f"Subject: {subject}\n"
                f"X-Kind: {kind}\n"
                f"X-Item: {subject_pid}\n"
                f"X-Queued-At: {queued_at}\n"
                f"\n{body}\n"
            )
            path.write_text(text, encoding="utf-8")
        return OutboxMessage(to, kind, subject_pid, body, queued_at, path)

    def messages(self) -> list:
        return sorted(self.directory.glob("*.eml"))


class NotificationService:
    def __init__(self, repo: Repository, outbox: Outbox):
        self.repo = repo
        self.outbox = outbox

    # --- subscriptions ---

    def subscribe(self, member_id: int, collection_id: int) -> bool:
        self.repo.get_node(collection_id)
        with self.repo.lock, self.repo.db:
            cur = self.repo.db.execute(
                "INSERT OR IGNORE INTO subscriptions (member, collection) VALUES (?,?)",
                (member_id, collection_id),
            )
        return cur.rowcount > 0

    def unsubscribe(self, member_id: int, collection_id: int) -> bool:
        with self.repo.lock, self.repo.db:
            cur = self.repo.db.execute(
                "DELETE FROM subscriptions WHERE member = ? AND collection = ?",
                (member_id, collection_id),
            )
        return cur.rowcount > 0

    def is_subscribed(self, member_id: int, collection_id: int) -> bool:
        return bool(self.repo.db.execute(
            "SELECT 1 FROM subscriptions WHERE member = ? AND collection = ?",
            (member_id, collection_id),
        ).fetchone())

    def subscriber_emails(self, collection_id: int) -> list:
        rows = self.repo.db.execute(
            "SELECT DISTINCT m.email FROM subscriptions s "
            "JOIN members m ON m.id = s.member WHERE s.collection = ? "
            "ORDER BY m.email",
            (collection_id,),
        ).fetchall()
        return [r[0] for r in rows]

    # --- notifications ---

    def on_deposit(self, item: Item) -> list:
        """One new-deposit message per current subscriber, exactly once each."""
        title = item.record.first("dc", "title") or item.pid
        spec = self.repo.set_spec(item.collection)
        messages = []
        for email in self.subscriber_emails(item.collection):
            messages.append(self.outbox.spool(
                email, "new-deposit", item.pid,
                f"New deposit in {spec}: {title}",
                f"A new item {item.pid} ({title}) was deposited in {spec}.",
            ))
        return messages

    def recommend(self, pid: str, to_email: str, from_name: str = None) -> OutboxMessage:
        item = self.repo.get_item(pid)
        if item.withdrawn:
            raise UnknownPid(f"item {pid} is withdrawn")
        if not _EMAIL_RE.match(to_email or ""):
            raise InvalidEmail(f"malformed address {to_email!r}")
        title = item.record.first("dc", "title") or pid
        sender = from_name or "a LAGO repository user"
        return self.outbox.spool(
            to_email, "recommendation", pid,
            f"Recommended item: {title}",
            f"{sender} recommends the repository item {pid} ({title}).",
        )
