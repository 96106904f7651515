from .browse import CRITERIA, browse, search
from .feeds import item_url, rss_feed, validate_rss
from .notify import NotificationService, Outbox, OutboxMessage
from .stats import EventLog, StatEvent, stats_report

__all__ = [
    "CRITERIA",
    "EventLog",
    "NotificationService",
    "Outbox",
    "OutboxMessage",
    "StatEvent",
    "browse",
    "item_url",
    "rss_feed",
    "search",
    "stats_report",
    "validate_rss",
]
