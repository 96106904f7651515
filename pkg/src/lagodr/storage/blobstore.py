"""Content-addressed blob storage.

Blobs live under ``assetstore/<aa>/<bb>/<fullhash>`` where aa/bb are the
first two hex byte pairs of the SHA-256 digest. Identical content shares
one path, so ingest dedupes for free.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from ..errors import ChecksumMismatch, UnknownAddress

_HEX = set("0123456789abcdef")


def sha256_hex(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


class BlobStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, address: str) -> Path:
        if len(address) != 64 or not set(address) <= _HEX:
            raise UnknownAddress(f"malformed content address: {address!r}")
        return self.root / address[0:2] / address[2:4] / address

    def put(self, content: bytes) -> tuple[str, str]:
        """Store content; returns (content-address, checksum), which coincide."""
        digest = sha256_hex(content)
        path = self._path(digest)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".incoming-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(content)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return digest, digest

    def put_file(self, source: str | Path) -> tuple[str, str]:
        return self.put(Path(source).read_bytes())

    def get(self, address: str) -> bytes:
        path = self._path(address)
        if not path.is_file():
            raise UnknownAddress(address)
        content = path.read_bytes()
        if sha256_hex(content) != address:
            raise ChecksumMismatch(f"stored content does not match address {address}")
        return content

    def has(self, address: str) -> bool:
        try:
            return self._path(address).is_file()
        except UnknownAddress:
            return False

    def count(self) -> int:
        return sum(1 for _ in self.addresses())

    def addresses(self):
        for sub in sorted(self.root.glob("??/??/*")):
            if sub.is_file():
                yield sub.name

    def verify(self) -> list[str]:
        """Sweep the assetstore; returns the addresses whose content is bad."""
        bad = []
        for address in self.addresses():
            try:
                self.get(address)
            except ChecksumMismatch:
                bad.append(address)
        return bad
