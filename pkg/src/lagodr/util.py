"""Small shared helpers: UTC datestamps at second granularity."""

from __future__ import annotations

import re
from datetime import datetime, timezone

UTC_PATTERN = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


def now_utc() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def format_utc(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_utc(value: str) -> datetime:
    """Parse a second-granularity UTC datestamp; raises ValueError otherwise."""
    if not UTC_PATTERN.match(value):
        raise ValueError(f"not a YYYY-MM-DDThh:mm:ssZ datestamp: {value!r}")
    return datetime.strptime(value, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
