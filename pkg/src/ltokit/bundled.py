"""Paths to the bundled fixture and snapshot files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

_PKG = "ltokit"


def _path(name: str) -> Path:
    return Path(str(resources.files(_PKG).joinpath("data", name)))


def fixture_theme_path() -> Path:
    """The 20-theme desk fixture."""
    return _path("fixture.lto.txt")


def fixture_story_path() -> Path:
    """The 12-story desk fixture corpus."""
    return _path("fixture.sto.txt")


def snapshot_path() -> Path:
    return _path("lto-snapshot.lto.txt")


def snapshot_manifest() -> dict:
    return json.loads(_path("lto-snapshot.json").read_text("utf-8"))
