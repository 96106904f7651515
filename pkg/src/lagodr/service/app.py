"""HTTP surface binding every module together.

JSON bodies under /api, form/query per OAI-PMH at /oai, RSS under /feeds.
Write endpoints require a bearer token; reads are anonymous.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from starlette.datastructures import UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from ..discovery import (
    EventLog,
    NotificationService,
    Outbox,
    browse,
    rss_feed,
    search,
    stats_report,
)
from ..errors import (
    Forbidden,
    LagodrError,
    Unauthorized,
    UnknownAddress,
    ValidationFailed,
    WithdrawnItem,
)
from ..harvest import Harvester
from ..ingest import IngestService, Member, MemberStore
from ..metadata import parse_manifest
from ..oai import OaiConfig, OaiServer
from ..storage import FileInput, Repository
from ..util import parse_utc
from .config import ApiConfig

_STATUS_BY_CODE = {
    "ValidationFailed": 400,
    "InvalidRecord": 400,
    "BadInterval": 400,
    "UnknownCriterion": 400,
    "InvalidEmail": 400,
    "Unreadable": 400,
    "BadToken": 400,
    "Unauthorized": 401,
    "Forbidden": 403,
    "UnknownPid": 404,
    "UnknownNode": 404,
    "UnknownSet": 404,
    "UnknownAddress": 404,
    "UnknownPeer": 404,
    "WithdrawnItem": 404,
    "DuplicateSlug": 409,
    "DuplicatePeer": 409,
    "AlreadyWithdrawn": 409,
}


class Services:
    """All primary components wired over one data directory."""

    def __init__(self, config: ApiConfig):
        self.config = config
        data_dir = Path(config.data_dir)
        self.repo = Repository(data_dir)
        self.members = MemberStore(self.repo)
        self.outbox = Outbox(data_dir / "outbox")
        self.notify = NotificationService(self.repo, self.outbox)
        self.ingest = IngestService(self.repo, self.members,
                                    on_deposit=self.notify.on_deposit)
        self.events = EventLog(data_dir / "store" / "events.log")
        self.oai = OaiServer(self.repo, OaiConfig(
            repository_name=config.repository_name,
            repo_id=config.repo_id,
            base_url=config.base_url,
            admin_email=config.admin_email,
            page_size=config.page_size,
            token_ttl_hours=config.token_ttl_hours,
        ))
        self.harvester = Harvester(data_dir / "store" / "harvester.db")

    def close(self):
        self.repo.close()
        self.harvester.close()


def _node_json(services: Services, node) -> dict:
    return {
        "id": node.id,
        "kind": node.kind,
        "name": node.name,
        "slug": node.slug,
        "parent": node.parent,
        "datatype": node.datatype,
        "set_spec": services.repo.set_spec(node.id),
    }


def _item_json(services: Services, item) -> dict:
    return {
        "pid": item.pid,
        "collection": item.collection,
        "set_spec": services.repo.set_spec(item.collection),
        "datestamp": item.datestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "withdrawn": item.withdrawn,
        "record": [
            {"schema": f.schema, "element": f.element, "qualifier": f.qualifier,
             "value": f.value, "lang": f.lang}
            for f in item.record
        ],
        "bitstreams": [
            {"seq": b.seq, "filename": b.filename, "role": b.role,
             "media_type": b.media_type, "size": b.size, "sha256": b.sha256,
             "license": b.license}
            for b in item.bitstreams
        ],
    }


def create_app(config: ApiConfig = None, services: Services = None,
               ui_dir: str | Path = None) -> FastAPI:
    config = config or ApiConfig()
    services = services or Services(config)
    app = FastAPI(title="LAGO Data Repository", version="0.1.0")
    app.state.services = services

    @app.exception_handler(LagodrError)
    async def lagodr_error_handler(request: Request, exc: LagodrError):
        body = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, ValidationFailed) and exc.report is not None:
            body["report"] = exc.report.to_dict()
        return JSONResponse(body, status_code=_STATUS_BY_CODE.get(exc.code, 500))

    def current_member(authorization: Optional[str] = Header(None)) -> Member:
        if not authorization or not authorization.startswith("Bearer "):
            raise Unauthorized("bearer token required")
        return services.members.authenticate(authorization[len("Bearer "):])

    # --- hierarchy ---

    @app.get("/api/communities")
    def get_communities():
        services.events.record_event("visit", "site")
        tree = []
        for community in services.repo.communities():
            entry = _node_json(services, community)
            entry["children"] = []
            for sub in services.repo.children(community.id):
                sub_entry = _node_json(services, sub)
                sub_entry["children"] = [
                    _node_json(services, c) for c in services.repo.children(sub.id)
                ]
                entry["children"].append(sub_entry)
            tree.append(entry)
        return {"communities": tree}

    @app.get("/api/nodes/{node_id}")
    def get_node(node_id: int):
        return _node_json(services, services.repo.get_node(node_id))

    @app.post("/api/nodes", status_code=201)
    def create_node(body: dict, member: Member = Depends(current_member)):
        if not member.admin:
            raise Forbidden("node creation requires an admin token")
        parent = body.get("parent")
        if parent is None and body.get("parent_set_spec"):
            parent = services.repo.node_by_set_spec(body["parent_set_spec"]).id
        node = services.repo.create_node(
            body["kind"], body["name"], body["slug"], parent, body.get("datatype")
        )
        return _node_json(services, node)

    # --- items ---

    @app.get("/api/collections/{node_id}/items")
    def collection_items(node_id: int):
        node = services.repo.get_node(node_id)
        items = services.repo.list_items(
            set_spec=services.repo.set_spec(node.id), include_withdrawn=False
        )
        items.sort(key=lambda it: (it.datestamp, it.num), reverse=True)
        return {"items": [_item_json(services, it) for it in items]}

    @app.post("/api/collections/{node_id}/items", status_code=201)
    async def deposit_item(node_id: int, request: Request,
                           member: Member = Depends(current_member)):
        form = await request.form()
        manifest = form.get("manifest")
        if manifest is None:
            raise ValidationFailed(None, "multipart field 'manifest' is required")
        if isinstance(manifest, UploadFile):
            manifest = (await manifest.read()).decode("utf-8")
        record, extras = parse_manifest(manifest)
        # optional per-file attributes: `file = <filename>,<role>,<license>`
        attrs = {}
        for key, value in extras:
            if key == "file":
                name, _, rest = value.partition(",")
                role, _, license_ = rest.partition(",")
                attrs[name.strip()] = (role.strip() or "data", license_.strip() or None)
        files = []
        for key, value in form.multi_items():
            if key == "manifest" or not isinstance(value, UploadFile):
                continue
            role, license_ = attrs.get(value.filename, ("data", None))
            files.append(FileInput(await value.read(), role, license_, value.filename,
                                   value.content_type))
        item = services.ingest.deposit(member, node_id, record, files)
        return _item_json(services, item)

    @app.get("/api/items/{pid:path}/bitstreams/{seq}")
    def download_bitstream(pid: str, seq: int):
        item = services.repo.get_item(pid)
        if item.withdrawn:
            raise WithdrawnItem(f"item {pid} is withdrawn; downloads refused")
        match = [b for b in item.bitstreams if b.seq == seq]
        if not match:
            raise UnknownAddress(f"no bitstream {seq} on {pid}")
        bitstream = match[0]
        content = services.repo.blobs.get(bitstream.sha256)
        services.events.record_event("download", pid, seq)
        return Response(
            content,
            media_type=bitstream.media_type,
            headers={
                "Content-Disposition": f'attachment; filename="{bitstream.filename}"'
            },
        )

    @app.post("/api/items/{pid:path}/withdraw")
    def withdraw(pid: str, member: Member = Depends(current_member)):
        item = services.repo.get_item(pid)
        community = services.repo.root_community(item.collection)
        if not member.admin and community.id not in member.grants:
            raise Forbidden("no grant for this community")
        return _item_json(services, services.repo.withdraw_item(pid))

    @app.post("/api/items/{pid:path}/recommend", status_code=201)
    def recommend(pid: str, body: dict):
        message = services.notify.recommend(
            pid, body.get("to_email", ""), body.get("from_name")
        )
        return {"queued": message.path.name}

    @app.get("/api/items/{pid:path}")
    def get_item(pid: str):
        item = services.repo.get_item(pid)
        services.events.record_event("item-view", pid)
        return _item_json(services, item)

    # --- discovery ---

    @app.get("/api/browse")
    def browse_endpoint(criterion: str, key: Optional[str] = None):
        services.events.record_event("visit", "site")
        items = browse(services.repo, criterion, key)
        return {"items": [_item_json(services, it) for it in items]}

    @app.get("/api/search")
    def search_endpoint(q: str = ""):
        services.events.record_event("visit", "site")
        items = search(services.repo, q)
        return {"items": [_item_json(services, it) for it in items]}

    @app.get("/api/aggregate/search")
    def aggregate_search(q: str = "", peer: Optional[str] = None,
                         country_set: Optional[str] = None,
                         datatype: Optional[str] = None):
        entries = services.harvester.aggregate_search(q, peer, country_set, datatype)
        return {"entries": [
            {"peer": e.peer, "identifier": e.identifier, "datestamp": e.datestamp,
             "dc": e.dc, "set_specs": list(e.set_specs)}
            for e in entries
        ]}

    @app.post("/api/subscriptions")
    def subscriptions(body: dict, member: Member = Depends(current_member)):
        collection = int(body["collection"])
        if body.get("subscribed", True):
            services.notify.subscribe(member.id, collection)
        else:
            services.notify.unsubscribe(member.id, collection)
        return {"collection": collection,
                "subscribed": services.notify.is_subscribed(member.id, collection)}

    @app.get("/api/stats")
    def stats(from_: Optional[str] = Query(None, alias="from"),
              until: Optional[str] = None, k: int = 10):
        from_dt = parse_utc(from_) if from_ else parse_utc("1970-01-01T00:00:00Z")
        until_dt = parse_utc(until) if until else parse_utc("9999-12-31T23:59:59Z")
        return stats_report(services.events, from_dt, until_dt, k)

    @app.get("/feeds/{set_spec}.rss")
    def feed(set_spec: str, k: Optional[int] = None):
        data = rss_feed(services.repo, set_spec, k or config.feed_k, config.base_url)
        return Response(data, media_type="application/rss+xml")

    # --- protocol ---

    @app.get("/oai")
    def oai_get(request: Request):
        return Response(services.oai.handle(dict(request.query_params)),
                        media_type="text/xml; charset=utf-8")

    @app.post("/oai")
    async def oai_post(request: Request):
        form = await request.form()
        return Response(services.oai.handle({k: str(v) for k, v in form.items()}),
                        media_type="text/xml; charset=utf-8")

    @app.get("/schemas/lago.xsd")
    def lago_schema():
        data = (importlib.resources.files("lagodr") / "schemas" / "lago.xsd").read_bytes()
        return Response(data, media_type="application/xml")

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
