"""Access to data files bundled with the package."""

import json
from functools import lru_cache
from importlib import resources


def _read_text(relpath: str) -> str:
    root = resources.files("shoptalk").joinpath("data")
    return root.joinpath(relpath).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_bundled_json(relpath: str):
    return json.loads(_read_text(relpath))


@lru_cache(maxsize=None)
def load_bundled_text(relpath: str) -> str:
    return _read_text(relpath)


def bundled_seed_scene_names() -> list[str]:
    root = resources.files("shoptalk").joinpath("data/seeds")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
