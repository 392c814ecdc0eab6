"""On-disk cache of classification reports, one JSON file per pair."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .orbits import ENGINE_VERSION, IsoClassReport

log = logging.getLogger(__name__)

CACHE_ENV = "NRTKIT_CACHE"


def default_cache_dir() -> Path | None:
    v = os.environ.get(CACHE_ENV)
    return Path(v) if v else None


def cache_key(group_hash: str, subgroup, engine_version: str = ENGINE_VERSION) -> str:
    sub = hashlib.sha256(",".join(map(str, subgroup)).encode()).hexdigest()
    return hashlib.sha256(f"{group_hash}:{sub}:{engine_version}".encode()).hexdigest()


def cache_store(directory, report: IsoClassReport) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = cache_key(report.group_hash, report.subgroup, report.engine_version)
    record = {"key": key, "report": report.to_json()}
    data = json.dumps(record, sort_keys=True)
    path = directory / f"{key}.json"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_load(directory, group_hash: str, subgroup, engine_version: str = ENGINE_VERSION) -> IsoClassReport | None:
    key = cache_key(group_hash, subgroup, engine_version)
    path = Path(directory) / f"{key}.json"
    if not path.exists():
        return None
    try:
        record = json.loads(path.read_text())
        if record.get("key") != key:
            raise ValueError("key mismatch")
        report = IsoClassReport.from_json(record["report"])
        if report.engine_version != engine_version:
            return None
        return report
    except (ValueError, KeyError, TypeError) as e:
        log.warning("ignoring corrupt cache record %s: %s", path, e)
        return None
