"""Pipeline configuration: defaults, config file, environment, CLI flags.

The config file is a flat UTF-8 ``key = value`` format ("#" comments,
blank lines allowed). Precedence, low to high: built-in defaults, config
file, PHRASERANK_EMBED_URL environment variable (URL only), explicit CLI
flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from phraserank.errors import ConfigError

ENV_EMBED_URL = "PHRASERANK_EMBED_URL"

_VALID_BACKENDS = ("hash", "http")


@dataclass(frozen=True)
class PipelineConfig:
    backend: str = "hash"
    hash_dim: int = 64
    hash_seed: int = 42
    http_url: str = "http://127.0.0.1:8756"
    http_batch_size: int = 32
    http_retries: int = 3
    stem: bool = False
    cutoffs: tuple[int, ...] = (5, 10, 15)
    workers: int = 1

    def validate(self) -> "PipelineConfig":
        if self.backend not in _VALID_BACKENDS:
            raise ConfigError(
                f"backend must be one of {', '.join(_VALID_BACKENDS)}; got {self.backend!r}"
            )
        if self.hash_dim < 1:
            raise ConfigError(f"hash.dim must be >= 1, got {self.hash_dim}")
        if self.http_batch_size < 1:
            raise ConfigError(f"http.batch_size must be >= 1, got {self.http_batch_size}")
        if self.http_retries < 1:
            raise ConfigError(f"http.retries must be >= 1, got {self.http_retries}")
        if not self.cutoffs:
            raise ConfigError("cutoffs must not be empty")
        if any(c < 1 for c in self.cutoffs):
            raise ConfigError(f"cutoffs must all be >= 1, got {self.cutoffs}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        return self


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _parse_cutoffs(key: str, raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key}: expected a comma-separated list of integers")
    return tuple(_parse_int(key, p) for p in parts)


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key = value lines into a dict of typed overrides."""
    overrides: dict = {}
    handlers = {
        "backend": ("backend", lambda k, v: v),
        "hash.dim": ("hash_dim", _parse_int),
        "hash.seed": ("hash_seed", _parse_int),
        "http.url": ("http_url", lambda k, v: v),
        "http.batch_size": ("http_batch_size", _parse_int),
        "http.retries": ("http_retries", _parse_int),
        "stem": ("stem", _parse_bool),
        "cutoffs": ("cutoffs", _parse_cutoffs),
        "workers": ("workers", _parse_int),
    }
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source} line {line_no}: expected 'key = value'")
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in handlers:
            raise ConfigError(f"{source} line {line_no}: unknown key {key!r}")
        field, parse = handlers[key]
        try:
            overrides[field] = parse(key, raw_value)
        except ConfigError as exc:
            raise ConfigError(f"{source} line {line_no}: {exc}") from None
    return overrides


def load_config(
    path: str | Path | None = None,
    cli_overrides: Mapping[str, object] | None = None,
    environ: Mapping[str, str] | None = None,
    defaults: PipelineConfig | None = None,
) -> PipelineConfig:
    """Resolve the effective configuration.

    cli_overrides holds only flags the user actually passed; None values
    are ignored. defaults replaces the built-in baseline for commands
    whose defaults differ.
    """
    config = PipelineConfig() if defaults is None else defaults
    if path is not None:
        file_path = Path(path)
        try:
            text = file_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {file_path}: {exc}") from None
        config = replace(config, **parse_config_text(text, source=str(file_path)))
    env = os.environ if environ is None else environ
    env_url = env.get(ENV_EMBED_URL)
    if env_url:
        config = replace(config, http_url=env_url)
    if cli_overrides:
        cleaned = {k: v for k, v in cli_overrides.items() if v is not None}
        if cleaned:
            config = replace(config, **cleaned)
    return config.validate()
