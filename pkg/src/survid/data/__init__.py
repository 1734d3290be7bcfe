"""Bundled example scenarios (specs, event logs, registries, forms)."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

SPECS = ("anpr.svs", "customer.svs", "tweets.svs", "dvla.svs", "identity.svs")


def path(name: str) -> Path:
    return Path(str(files(__name__) / name))
