"""RSS 2.0 channels at every hierarchy level."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from datetime import datetime, timezone

from ..errors import UnknownNode, UnknownSet
from ..storage.repository import Repository


def _rfc822(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%a, %d %b %Y %H:%M:%S GMT")


def item_url(base_url: str, pid: str) -> str:
    return f"{base_url}/ui/#/items/{pid}"


def rss_feed(repo: Repository, set_spec: str, k: int = 20,
             base_url: str = "http://localhost:8080") -> bytes:
    """Feed of the k most recent non-withdrawn items in the node's subtree."""
    try:
        node = repo.node_by_set_spec(set_spec)
    except UnknownNode as exc:
        raise UnknownSet(str(exc)) from exc
    k = max(1, int(k))
    items = repo.list_items(set_spec=set_spec, include_withdrawn=False)
    items.sort(key=lambda it: (it.datestamp, it.num), reverse=True)
    items = items[:k]

    rss = ET.Element("rss", version="2.0")
    channel = ET.SubElement(rss, "channel")
    ET.SubElement(channel, "title").text = node.name
    ET.SubElement(channel, "link").text = f"{base_url}/ui/#/browse/{set_spec}"
    ET.SubElement(channel, "description").text = (
        f"Recent deposits under {set_spec}"
    )
    ET.SubElement(channel, "lastBuildDate").text = _rfc822(
        items[0].datestamp if items else repo.earliest_datestamp()
    )
    for it in items:
        entry = ET.SubElement(channel, "item")
        ET.SubElement(entry, "title").text = it.record.first("dc", "title") or it.pid
        ET.SubElement(entry, "link").text = item_url(base_url, it.pid)
        guid = ET.SubElement(entry, "guid")
        guid.set("isPermaLink", "false")
        guid.text = it.pid
        ET.SubElement(entry, "pubDate").text = _rfc822(it.datestamp)
        description = it.record.first("dc", "description")
        if description:
            ET.SubElement(entry, "description").text = description
    return ET.tostring(rss, encoding="utf-8", xml_declaration=True)


def validate_rss(data: bytes) -> ET.Element:
    """Structural RSS 2.0 check used as the feed test oracle."""
    root = ET.fromstring(data)
    if root.tag != "rss" or root.get("version") != "2.0":
        raise ValueError("not an RSS 2.0 document")
    channels = root.findall("channel")
    if len(channels) != 1:
        raise ValueError("rss must hold exactly one channel")
    channel = channels[0]
    for required in ("title", "link", "description"):
        if channel.find(required) is None:
            raise ValueError(f"channel missing <{required}>")
    for entry in channel.findall("item"):
        if entry.find("title") is None and entry.find("description") is None:
            raise ValueError("item needs a title or a description")
    return root
