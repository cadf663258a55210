"""Runtime configuration shared by the service and the CLI: one JSON config
file plus DECMINE_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .learners import DEFAULT_GRIDS, KINDS


@dataclass
class Config:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "decmine-data"
    max_upload_bytes: int = 50_000_000
    seed: int = 0
    kinds: tuple[str, ...] = KINDS
    grids: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_GRIDS.items()})
    background_size: int = 100
    global_instances: int = 100
    explain_budget_seconds: float = 30.0
    threads: int = 1

    def to_dict(self) -> dict:
        return {
            "host": self.host,
            "port": self.port,
            "data_dir": self.data_dir,
            "max_upload_bytes": self.max_upload_bytes,
            "seed": self.seed,
            "kinds": list(self.kinds),
            "grids": self.grids,
            "background_size": self.background_size,
            "global_instances": self.global_instances,
            "explain_budget_seconds": self.explain_budget_seconds,
            "threads": self.threads,
        }


_ENV_OVERRIDES = {
    "DECMINE_HOST": ("host", str),
    "DECMINE_PORT": ("port", int),
    "DECMINE_DATA_DIR": ("data_dir", str),
    "DECMINE_MAX_UPLOAD_BYTES": ("max_upload_bytes", int),
    "DECMINE_SEED": ("seed", int),
    "DECMINE_THREADS": ("threads", int),
}


def load_config(path: str | Path | None = None, env: dict | None = None) -> Config:
    """Config file first, environment variables second."""
    cfg = Config()
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid config JSON: {exc}") from None
        known = {f.name for f in fields(Config)}
        for key, value in doc.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "kinds":
                value = tuple(value)
            setattr(cfg, key, value)
    env = os.environ if env is None else env
    for var, (attr, cast) in _ENV_OVERRIDES.items():
        if var in env:
            try:
                setattr(cfg, attr, cast(env[var]))
            except ValueError:
                raise ConfigError(f"bad value for {var}: {env[var]!r}") from None
    for kind in cfg.kinds:
        if kind not in KINDS:
            raise ConfigError(f"unknown learner kind in config: {kind!r}")
    return cfg
