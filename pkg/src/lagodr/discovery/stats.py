"""Append-only statistics event log and the windowed report over it.

Reports are pure folds of the log; there are no cached counters to drift.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from ..errors import BadInterval
from ..util import format_utc, now_utc, parse_utc

KINDS = ("visit", "item-view", "download")


@dataclass(frozen=True)
class StatEvent:
    kind: str
    subject: str  # pid, node id, or "site"
    bitstream_seq: Optional[int] = None
    at: datetime = None


def _pid_sort_key(pid: str):
    # numeric ordering for lago/<n> pids, lexical fallback otherwise
    if pid.startswith("lago/") and pid[5:].isdigit():
        return (0, int(pid[5:]), pid)
    return (1, 0, pid)


class EventLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def record_event(self, kind: str, subject: str,
                     bitstream_seq: int = None, at: datetime = None) -> StatEvent:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        at = at or now_utc()
        line = json.dumps({
            "kind": kind,
            "subject": subject,
            "seq": bitstream_seq,
            "at": format_utc(at),
        }, separators=(",", ":"))
        with self._lock, self.path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        return StatEvent(kind, subject, bitstream_seq, at)

    def events(self) -> Iterator[StatEvent]:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                data = json.loads(line)
                yield StatEvent(data["kind"], data["subject"], data.get("seq"),
                                parse_utc(data["at"]))


def stats_report(log: EventLog, from_: datetime, until: datetime,
                 top_k: int = 10) -> dict:
    """Counts over the half-open window [from, until); top lists ranked by
    count, ties broken by ascending pid."""
    if from_ > until:
        raise BadInterval("from is later than until")
    visits = downloads = 0
    download_counts: dict = {}
    view_counts: dict = {}
    for ev in log.events():
        if not (from_ <= ev.at < until):
            continue
        if ev.kind == "visit":
            visits += 1
        elif ev.kind == "download":
            downloads += 1
            download_counts[ev.subject] = download_counts.get(ev.subject, 0) + 1
        elif ev.kind == "item-view":
            view_counts[ev.subject] = view_counts.get(ev.subject, 0) + 1

    def top(counts: dict) -> list:
        ranked = sorted(counts.items(),
                        key=lambda kv: (-kv[1], _pid_sort_key(kv[0])))
        return [{"pid": pid, "count": n} for pid, n in ranked[:top_k]]

    return {
        "visits": visits,
        "downloads": downloads,
        "top_downloaded": top(download_counts),
        "top_viewed": top(view_counts),
    }
