"""Bundled multi-map documents."""

import json
from importlib import resources

from ..core import MarkovMultiMap, parse_spec

NAMES = ("example-7-1", "example-7-2", "identity", "half-tent", "split-components")


def fixture_path(name: str):
    return resources.files(__name__) / f"{name}.json"


def load_document(name: str) -> dict:
    return json.loads(fixture_path(name).read_text())


def load_fixture(name: str) -> MarkovMultiMap:
    return parse_spec(load_document(name))
