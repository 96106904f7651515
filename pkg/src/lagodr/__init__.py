"""lagodr: a federated scientific data repository.

Hierarchical metadata-plus-files store with OAI-PMH harvesting, RSS
syndication, permissions, statistics and a portal API.
"""

__version__ = "0.1.0"
