# src/core/cache.py
"""Content-addressed JSON cache: one file per (group spec, tool version)."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from typing import Any, Dict, Optional

from . import config
from .groups import GroupSpec

log = logging.getLogger(__name__)


def cache_key(spec: GroupSpec) -> str:
    payload = json.dumps({"spec": spec.to_json(), "version": config.TOOL_VERSION}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _path(spec: GroupSpec, cache_dir: Optional[str] = None) -> str:
    return os.path.join(cache_dir or config.CACHE_DIR, f"{cache_key(spec)}.json")


def load_entry(spec: GroupSpec, cache_dir: Optional[str] = None) -> Optional[Dict[str, Any]]:
    path = _path(spec, cache_dir)
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            entry = json.load(f)
    except (OSError, ValueError) as e:
        log.warning(f"Ignoring unreadable cache file {path}: {e}")
        return None
    if entry.get("version") != config.TOOL_VERSION or entry.get("spec") != spec.to_json():
        log.warning(f"Ignoring stale cache file {path}")
        return None
    log.info(f"Cache hit {os.path.basename(path)}")
    return entry


def store_entry(spec: GroupSpec, updates: Dict[str, Any], cache_dir: Optional[str] = None) -> None:
    """Merge `updates` into the entry for `spec`; written via temp file + rename."""
    directory = cache_dir or config.CACHE_DIR
    path = _path(spec, directory)
    entry = load_entry(spec, directory) or {"spec": spec.to_json(), "version": config.TOOL_VERSION}
    entry.update(updates)
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(entry, f, sort_keys=True)
        os.replace(tmp, path)
    except OSError as e:
        log.warning(f"Could not write cache file {path}: {e}")
