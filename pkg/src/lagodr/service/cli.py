"""Operator CLI.

Every subcommand exits 0 on success and nonzero with one machine-parsable
`error: <code>: <message>` line on failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ..errors import LagodrError, Unreadable
from ..storage.export import export_item, read_export
from ..util import parse_utc
from .app import Services, create_app
from .config import ApiConfig, load_config


def _services(ctx) -> Services:
    return Services(ctx.obj["config"])


def _fail(exc: LagodrError):
    click.echo(f"error: {exc.code}: {exc}", err=True)
    sys.exit(1)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Path to lago-dr.toml (defaults to ./lago-dr.toml).")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Override the data directory.")
@click.pass_context
def main(ctx, config_path, data_dir):
    """LAGO data repository operator commands."""
    config = load_config(config_path)
    if data_dir:
        config.data_dir = data_dir
    ctx.obj = {"config": config}


@main.command()
@click.option("--hierarchy", type=click.Path(exists=True), default=None,
              help="TSV seed: kind, name, slug, parent set spec, datatype.")
@click.pass_context
def init(ctx, hierarchy):
    """Create the data directories and optionally seed the hierarchy."""
    services = _services(ctx)
    created = 0
    try:
        if hierarchy:
            for raw in Path(hierarchy).read_text(encoding="utf-8").splitlines():
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) < 3:
                    raise Unreadable(f"malformed hierarchy line: {raw!r}")
                kind, name, slug = parts[0], parts[1], parts[2]
                parent_spec = parts[3] if len(parts) > 3 and parts[3] else None
                datatype = parts[4] if len(parts) > 4 and parts[4] else None
                parent = (services.repo.node_by_set_spec(parent_spec).id
                          if parent_spec else None)
                services.repo.create_node(kind, name, slug, parent, datatype)
                created += 1
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"initialized {ctx.obj['config'].data_dir} ({created} nodes)")


@main.command()
@click.pass_context
def serve(ctx):
    """Run the HTTP service."""
    import uvicorn

    config = ctx.obj["config"]
    ui_dir = Path(__file__).resolve().parents[4] / "frontend" / "dist"
    app = create_app(config, ui_dir=ui_dir if ui_dir.is_dir() else None)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.group()
def members():
    """Member provisioning."""


@members.command("load")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
def members_load(ctx, path):
    """Load members.tsv: name, email, token, comma-joined community slugs."""
    services = _services(ctx)
    try:
        count = services.members.load_members_file(path)
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"loaded {count} members")


@main.command()
@click.argument("export_dir", type=click.Path(exists=True))
@click.option("--collection", "set_spec", required=True,
              help="Target collection set spec, e.g. ve:ula:wcd-raw.")
@click.option("--token", required=True, help="Member bearer token.")
@click.pass_context
def deposit(ctx, export_dir, set_spec, token):
    """Deposit one item-export directory."""
    services = _services(ctx)
    try:
        member = services.members.authenticate(token)
        collection = services.repo.node_by_set_spec(set_spec)
        record, files = read_export(export_dir)
        item = services.ingest.deposit(member, collection.id, record, files)
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"deposited {item.pid}")


@main.command("bulk-load")
@click.argument("root", type=click.Path(exists=True))
@click.option("--token", required=True, help="Member bearer token.")
@click.pass_context
def bulk_load(ctx, root, token):
    """Bulk-load every entry listed in <root>/entries.tsv."""
    services = _services(ctx)
    try:
        member = services.members.authenticate(token)
        report = services.ingest.bulk_load(member, root)
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"attempted={report.attempted} succeeded={report.succeeded} "
               f"failed={len(report.failed)}")
    for entry, code, message in report.failed:
        click.echo(f"failed: {entry}: {code}: {message}", err=True)
    if report.failed:
        sys.exit(2)


@main.group()
def peers():
    """Federation peer registry."""


@peers.command("add")
@click.argument("name")
@click.argument("base_url")
@click.pass_context
def peers_add(ctx, name, base_url):
    services = _services(ctx)
    try:
        services.harvester.register_peer(name, base_url)
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"registered peer {name}")


@peers.command("list")
@click.pass_context
def peers_list(ctx):
    services = _services(ctx)
    for peer in services.harvester.peers():
        click.echo(f"{peer.name}\t{peer.base_url}\t{peer.status}\t"
                   f"{peer.watermark or '-'}")


@main.command()
@click.argument("peer")
@click.option("--full", is_flag=True, help="Force a full (non-incremental) harvest.")
@click.pass_context
def harvest(ctx, peer, full):
    """Harvest one registered peer."""
    services = _services(ctx)
    try:
        report = services.harvester.harvest(peer, "full" if full else "incremental")
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"peer={report.peer} mode={report.mode} fetched={report.fetched} "
               f"upserted={report.upserted} deleted={report.deleted} "
               f"pages={report.pages}")


@main.command()
@click.pass_context
def verify(ctx):
    """Checksum-sweep the assetstore."""
    services = _services(ctx)
    bad = services.repo.blobs.verify()
    if bad:
        for address in bad:
            click.echo(f"error: ChecksumMismatch: {address}", err=True)
        sys.exit(1)
    click.echo(f"verified {services.repo.blobs.count()} blobs, all good")


@main.command()
@click.option("--from", "from_", default="1970-01-01T00:00:00Z", show_default=True)
@click.option("--until", default="9999-12-31T23:59:59Z", show_default=True)
@click.option("-k", "top_k", default=10, show_default=True)
@click.pass_context
def stats(ctx, from_, until, top_k):
    """Print the visits/downloads report for a window."""
    from ..discovery import stats_report

    services = _services(ctx)
    try:
        report = stats_report(services.events, parse_utc(from_), parse_utc(until),
                              top_k)
    except (LagodrError, ValueError) as exc:
        code = exc.code if isinstance(exc, LagodrError) else "BadInterval"
        click.echo(f"error: {code}: {exc}", err=True)
        sys.exit(1)
    click.echo(f"visits={report['visits']} downloads={report['downloads']}")
    for label in ("top_downloaded", "top_viewed"):
        for row in report[label]:
            click.echo(f"{label}: {row['pid']} {row['count']}")


@main.command()
@click.argument("pid")
@click.option("--dest", type=click.Path(), required=True)
@click.pass_context
def export(ctx, pid, dest):
    """Write one item as an export directory."""
    services = _services(ctx)
    try:
        export_item(services.repo, pid, dest)
    except LagodrError as exc:
        _fail(exc)
    click.echo(f"exported {pid} to {dest}")


if __name__ == "__main__":
    main()
