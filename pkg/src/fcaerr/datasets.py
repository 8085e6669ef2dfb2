"""Small contexts shipped with the package, transcribed from published figures."""

from __future__ import annotations

from importlib import resources

from .context import FormalContext
from .io import parse_cxt

FIXTURES = ("living_beings", "living_beings_scale", "eq3", "neq3", "domestic_scale")


def fixture_path(name: str):
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("fcaerr") / "data" / f"{name}.cxt"


def load_fixture(name: str) -> FormalContext:
    return parse_cxt(fixture_path(name).read_text(encoding="utf-8"))
