"""Persistent orbit-closure cache.

Closures at degree 9 and 10 take seconds to recompute, so results can be kept
across runs in a JSON file keyed by group fingerprint. Off unless the
``persistent_cache`` limit is enabled.
"""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from filelock import FileLock

from relkit import config as _config

logger = logging.getLogger(__name__)


def _cache_path() -> Path:
    return _config.get_cache_dir() / "closures.json"


def _backup_corrupt(path: Path) -> Path:
    """Rename a corrupt file to a timestamped backup before it gets overwritten."""
    ts = datetime.now(UTC).strftime("%Y%m%dT%H%M%S")
    backup = path.with_name(f"{path.name}.corrupt.{ts}")
    path.rename(backup)
    logger.warning("Corrupt cache backed up: %s → %s", path, backup)
    return backup


@contextmanager
def _locked() -> Iterator[None]:
    """Hold an exclusive file lock during cache read-modify-write."""
    cp = _cache_path()
    cp.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(cp.with_suffix(".lock"))
    with lock:
        yield


def _load() -> dict[str, Any]:
    cp = _cache_path()
    if not cp.exists():
        return {}
    try:
        data = json.loads(cp.read_text())
    except (json.JSONDecodeError, ValueError):
        _backup_corrupt(cp)
        return {}
    if not isinstance(data, dict):
        _backup_corrupt(cp)
        return {}
    return data


def _save(entries: dict[str, Any]) -> None:
    cp = _cache_path()
    cp.parent.mkdir(parents=True, exist_ok=True)
    tmp = cp.with_suffix(".tmp")
    tmp.write_text(json.dumps(entries, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, cp)


def lookup_closure(fingerprint: str) -> list[list[int]] | None:
    """Generator image tables of the cached closure, or None."""
    with _locked():
        entry = _load().get(fingerprint)
    if entry is None:
        return None
    return entry.get("generators")


def store_closure(fingerprint: str, degree: int, order: int, generators: list[list[int]]) -> None:
    with _locked():
        entries = _load()
        entries[fingerprint] = {"degree": degree, "order": order, "generators": generators}
        _save(entries)


def clear_cache() -> int:
    """Remove every cached closure. Returns how many were dropped."""
    with _locked():
        entries = _load()
        _save({})
    return len(entries)


@dataclass
class CacheHealth:
    """Result of a read-only cache health check."""

    path: Path
    exists: bool = False
    valid_json: bool = False
    entry_count: int = 0
    corrupt_backups: list[Path] = field(default_factory=list)


def check_cache_health() -> CacheHealth:
    """Read-only probe of the cache file state. Never modifies files."""
    cp = _cache_path()
    health = CacheHealth(path=cp)
    if cp.parent.exists():
        health.corrupt_backups = sorted(cp.parent.glob(f"{cp.name}.corrupt.*"))
    if not cp.exists():
        return health
    health.exists = True
    try:
        data = json.loads(cp.read_text())
    except (json.JSONDecodeError, ValueError):
        return health
    if isinstance(data, dict):
        health.valid_json = True
        health.entry_count = len(data)
    return health
