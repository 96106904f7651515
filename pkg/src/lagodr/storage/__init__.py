from .blobstore import BlobStore, sha256_hex
from .repository import (
    CC_LICENSES,
    KINDS,
    ROLES,
    Bitstream,
    FileInput,
    HierarchyNode,
    Item,
    Repository,
)
from .export import BitstreamLine, export_item, read_export

__all__ = [
    "Bitstream",
    "BitstreamLine",
    "BlobStore",
    "CC_LICENSES",
    "FileInput",
    "HierarchyNode",
    "Item",
    "KINDS",
    "ROLES",
    "Repository",
    "export_item",
    "read_export",
    "sha256_hex",
]
