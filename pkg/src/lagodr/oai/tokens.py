"""Stateless resumption tokens: the paging cursor serialized and
base64url-encoded, so the server keeps no token table and survives restarts.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from ..errors import BadToken
from ..util import format_utc, parse_utc


@dataclass(frozen=True)
class ResumptionToken:
    cursor_datestamp: datetime
    cursor_num: int
    metadata_prefix: str
    from_: Optional[datetime]
    until: Optional[datetime]
    set_spec: Optional[str]
    issued_at: datetime
    complete_list_size: int
    delivered: int  # records delivered so far (protocol cursor attribute)

    def encode(self) -> str:
        payload = {
            "c": [format_utc(self.cursor_datestamp), self.cursor_num],
            "p": self.metadata_prefix,
            "f": format_utc(self.from_) if self.from_ else None,
            "u": format_utc(self.until) if self.until else None,
            "s": self.set_spec,
            "i": format_utc(self.issued_at),
            "n": self.complete_list_size,
            "d": self.delivered,
        }
        raw = json.dumps(payload, separators=(",", ":")).encode()
        return base64.urlsafe_b64encode(raw).decode().rstrip("=")


def decode_token(value: str) -> ResumptionToken:
    try:
        padded = value + "=" * (-len(value) % 4)
        raw = base64.urlsafe_b64decode(padded.encode())
        payload = json.loads(raw)
        return ResumptionToken(
            cursor_datestamp=parse_utc(payload["c"][0]),
            cursor_num=int(payload["c"][1]),
            metadata_prefix=payload["p"],
            from_=parse_utc(payload["f"]) if payload.get("f") else None,
            until=parse_utc(payload["u"]) if payload.get("u") else None,
            set_spec=payload.get("s"),
            issued_at=parse_utc(payload["i"]),
            complete_list_size=int(payload["n"]),
            delivered=int(payload["d"]),
        )
    except (ValueError, KeyError, TypeError, binascii.Error, json.JSONDecodeError) as exc:
        raise BadToken(f"malformed resumption token: {exc}") from exc
