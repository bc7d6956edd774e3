"""Shipped circuit preset: the 10-mode heralded-GHZ interferometer.

The preset lives in data/ghz_preset.json as a circuit file plus the herald
rule with its frozen per-pattern local Z corrections and a provenance note;
this module only loads and validates it.
"""

from __future__ import annotations

import json
from importlib import resources

from .circuits import CircuitSpec
from .heralding import HeraldRule

_PRESET_RESOURCE = "ghz_preset.json"


def load_preset_bundle() -> dict:
    """Raw preset bundle: {'circuit', 'herald_rule', 'provenance', ...}."""
    text = (
        resources.files("heraldghz").joinpath("data").joinpath(_PRESET_RESOURCE)
    ).read_text()
    return json.loads(text)


def ghz_preset() -> CircuitSpec:
    """The shipped 10-mode GHZ-generation circuit."""
    return CircuitSpec.from_dict(load_preset_bundle()["circuit"])


def ghz_herald_rule() -> HeraldRule:
    """Herald rule with the frozen per-pattern local Z corrections."""
    return HeraldRule.from_dict(load_preset_bundle()["herald_rule"])
