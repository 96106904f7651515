"""Service configuration: documented defaults, overridden by a
`lago-dr.toml` file, overridden in turn by LAGODR_* environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

ENV_PREFIX = "LAGODR_"
CONFIG_FILENAME = "lago-dr.toml"

_INT_KEYS = {"page_size", "token_ttl_hours", "feed_k"}


@dataclass
class ApiConfig:
    listen: str = "127.0.0.1:8080"
    repository_name: str = "LAGO Data Repository"
    repo_id: str = "lago-dr.example.org"
    base_url: str = "http://127.0.0.1:8080"
    page_size: int = 100
    token_ttl_hours: int = 24
    data_dir: str = "./data"
    feed_k: int = 20
    admin_email: str = "admin@lago-dr.example.org"

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def load_config(path: str | Path = None, env: dict = None) -> ApiConfig:
    env = os.environ if env is None else env
    config = ApiConfig()
    known = {f.name for f in fields(ApiConfig)}

    candidate = Path(path) if path else Path(CONFIG_FILENAME)
    if candidate.is_file():
        with candidate.open("rb") as fh:
            data = tomllib.load(fh)
        for key, value in data.items():
            if key in known:
                setattr(config, key, int(value) if key in _INT_KEYS else str(value))

    for key in known:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            setattr(config, key, int(raw) if key in _INT_KEYS else raw)
    return config
