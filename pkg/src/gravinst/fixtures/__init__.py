"""Shipped case catalog and reference data.

Set ``GRAVINST_FIXTURES`` to a directory containing replacement JSON files.
"""

from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any


def fixture_dir() -> Path:
    override = os.environ.get("GRAVINST_FIXTURES")
    if override:
        return Path(override)
    return Path(str(resources.files(__name__)))


@lru_cache(maxsize=None)
def _load(directory: str, name: str) -> Any:
    with open(Path(directory) / name, encoding="utf-8") as fh:
        return json.load(fh)


def load_fixture(name: str) -> Any:
    return _load(str(fixture_dir()), name)


def load_catalog() -> Any:
    return load_fixture("cases.json")
