from .client import AggregateEntry, Harvester, HarvestReport, PeerSite

__all__ = ["AggregateEntry", "Harvester", "HarvestReport", "PeerSite"]
