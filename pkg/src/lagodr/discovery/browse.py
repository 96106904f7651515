"""Anonymous browse and search over the local repository."""

from __future__ import annotations

from ..errors import UnknownCriterion
from ..storage.repository import Item, Repository

CRITERIA = ("country", "responsible", "filename", "filetype")


def _ordered(items: list) -> list:
    return sorted(items, key=lambda it: (it.datestamp, it.num), reverse=True)


def _all_live_items(repo: Repository) -> list:
    return repo.list_items(include_withdrawn=False)


def browse(repo: Repository, criterion: str, key: str = None) -> list:
    """Listing by one of the portal's four criteria; withdrawn items are
    excluded and results come back newest first."""
    if criterion not in CRITERIA:
        raise UnknownCriterion(f"unknown browse criterion {criterion!r}")
    needle = (key or "").lower()

    if criterion == "country":
        if key:
            try:
                items = repo.list_items(set_spec=key, include_withdrawn=False)
            except Exception:
                items = []
        else:
            items = _all_live_items(repo)
        return _ordered(items)

    items = _all_live_items(repo)
    if criterion == "responsible":
        matched = [
            it for it in items
            if any(needle in v.lower() for v in it.record.values("lago", "responsible"))
        ]
    elif criterion == "filename":
        matched = [
            it for it in items
            if any(needle in b.filename.lower() for b in it.bitstreams)
        ]
    else:  # filetype: bitstream role or collection datatype
        matched = [
            it for it in items
            if any(b.role == key for b in it.bitstreams)
            or repo.get_node(it.collection).datatype == key
        ]
    return _ordered(matched)


def search(repo: Repository, query: str) -> list:
    """Case-insensitive all-terms substring search over title, creator-ish
    and description-ish fields of the native record."""
    terms = [t.lower() for t in query.split() if t]
    results = []
    for item in _all_live_items(repo):
        haystack = " ".join(
            f.value for f in item.record
            if f.element in ("title", "description", "creator", "subject")
            or (f.schema, f.element) in (("lago", "responsible"), ("lago", "site"))
        ).lower()
        if all(t in haystack for t in terms):
            results.append(item)
    return _ordered(results)
