"""Canonical JSON: equal documents serialize to identical bytes.

Keys are sorted, separators fixed, floats use Python's shortest-roundtrip
repr. All pipeline outputs go through this module so reruns and
reserializations are byte-comparable.
"""

import json
from pathlib import Path

from .errors import ConfigError


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {p}: {exc}") from exc
