"""Item export/import: a directory holding `manifest` plus the files.

The manifest carries the flat metadata lines followed by one
`bitstream = seq,filename,role,media_type,size,sha256,license` line per file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import ChecksumMismatch, Unreadable
from ..metadata import MetadataRecord, format_manifest, parse_manifest
from .blobstore import sha256_hex
from .repository import FileInput, Repository


@dataclass(frozen=True)
class BitstreamLine:
    seq: int
    filename: str
    role: str
    media_type: str
    size: int
    sha256: str
    license: Optional[str]

    def format(self) -> str:
        return ",".join([
            str(self.seq), self.filename, self.role, self.media_type,
            str(self.size), self.sha256, self.license or "",
        ])

    @classmethod
    def parse(cls, value: str) -> "BitstreamLine":
        # filename may contain commas: seq comes off the front, the last
        # five fields off the back, filename is whatever remains
        seq, _, rest = value.partition(",")
        parts = rest.rsplit(",", 5)
        if len(parts) != 6:
            raise ValueError(f"malformed bitstream line: {value!r}")
        filename, role, media_type, size, sha256, license_ = parts
        return cls(int(seq), filename, role, media_type, int(size), sha256,
                   license_ or None)


def export_item(repo: Repository, pid: str, dest: str | Path) -> Path:
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    item = repo.get_item(pid)
    extras = [("bitstream", BitstreamLine(
        b.seq, b.filename, b.role, b.media_type, b.size, b.sha256, b.license,
    ).format()) for b in item.bitstreams]
    (dest / "manifest").write_text(format_manifest(item.record, extras), encoding="utf-8")
    for b in item.bitstreams:
        (dest / b.filename).write_bytes(repo.blobs.get(b.sha256))
    return dest


def read_export(source: str | Path) -> tuple[MetadataRecord, list[FileInput]]:
    """Load an export directory, verifying each file against its manifest digest."""
    source = Path(source)
    manifest_path = source / "manifest"
    if not manifest_path.is_file():
        raise Unreadable(f"no manifest in {source}")
    record, extras = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    files = []
    for key, value in extras:
        if key != "bitstream":
            continue
        line = BitstreamLine.parse(value)
        path = source / line.filename
        if not path.is_file():
            raise Unreadable(f"missing file {line.filename} in {source}")
        content = path.read_bytes()
        if sha256_hex(content) != line.sha256:
            raise ChecksumMismatch(
                f"{line.filename}: content does not match the manifest digest"
            )
        files.append((line.seq, FileInput(content, line.role, line.license,
                                          line.filename, line.media_type)))
    files.sort(key=lambda pair: pair[0])
    return record, [f for _, f in files]
