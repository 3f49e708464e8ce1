"""Bundled oracle-definition assets.

Seven oracles ship with the package: the four single-property examples
(listing1..listing4, one per property class: safety, liveness, timeliness,
temporal) and three composite oracles in the style of a grading rubric, a
driving competition, and a framework test suite (od1_rubric, od2_competition,
od3_framework). The composite three are representative reconstructions that
deliberately weight properties differently. Catalog names are a stable
public contract.
"""

from __future__ import annotations

from importlib import resources

from .errors import CatalogError

BUILTIN_NAMES = (
    "listing1",
    "listing2",
    "listing3",
    "listing4",
    "od1_rubric",
    "od2_competition",
    "od3_framework",
)


def load_builtin(name: str) -> str:
    """Return the source text of a bundled oracle definition."""
    if name not in BUILTIN_NAMES:
        raise CatalogError(
            f"unknown builtin oracle '{name}' (available: {', '.join(BUILTIN_NAMES)})"
        )
    return (
        resources.files("odl").joinpath(f"assets/{name}.odl").read_text(encoding="utf-8")
    )


def load_example_scenario(name: str) -> str:
    """Return the source text of a bundled example scenario (nominal, eventful)."""
    path = resources.files("odl").joinpath(f"assets/scenarios/{name}.json")
    if not path.is_file():
        raise CatalogError(f"unknown example scenario '{name}'")
    return path.read_text(encoding="utf-8")
