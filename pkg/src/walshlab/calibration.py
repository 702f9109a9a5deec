"""Observed constants from the reference oracle run, used as regression limits."""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

MARGIN = 1.25


def round_up(x: float, digits: int = 2) -> float:
    """Round ``x > 0`` up to ``digits`` significant digits."""
    if x <= 0:
        return 0.0
    e = math.floor(math.log10(x)) - digits + 1
    return float(f"{math.ceil(x / 10.0 ** e)}e{e}")


def limit(observed: float, margin: float = MARGIN) -> float:
    return round_up(observed * margin)


@lru_cache(maxsize=1)
def load_calibration() -> dict:
    text = resources.files("walshlab").joinpath("data/calibration.json").read_text()
    return json.loads(text)


def multiplier_limits() -> dict:
    return dict(load_calibration()["multiplier"])


def square_limits() -> dict:
    return dict(load_calibration()["square"])
