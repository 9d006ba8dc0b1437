"""SI quantity parsing and formatting.

Scenario files carry every physical quantity as a string with an explicit
unit suffix ("1 fF", "3 kΩ", "160 uW", "15 mK"). A bare number where a unit
is expected is an error.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal

PREFIXES = {
    "y": 1e-24,
    "z": 1e-21,
    "a": 1e-18,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "μ": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "K": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

# canonical unit -> accepted spellings, longest first so "ohm" wins over "Ω"
UNITS = {
    "F": ("F",),
    "ohm": ("ohms", "ohm", "Ohm", "Ω"),
    "V": ("V",),
    "Hz": ("Hz",),
    "W": ("W",),
    "K": ("K",),
    "s": ("s",),
    "A": ("A",),
    "J": ("J",),
    "bit/s": ("bit/s", "b/s"),
}

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")


class UnitError(ValueError):
    pass


def parse_quantity(text, unit: str) -> float:
    """Parse ``text`` as a quantity in ``unit`` and return it in base SI units."""
    if not isinstance(text, str):
        raise UnitError(f"expected a string with a unit suffix ({unit}), got {text!r}")
    m = _NUMBER.match(text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    suffix = m.group(2)
    if not suffix:
        raise UnitError(f"missing unit in {text!r} (expected {unit})")
    for spelling in UNITS[unit]:
        if suffix.endswith(spelling):
            prefix = suffix[: -len(spelling)].strip()
            # "K" is the kelvin unit; only accept it as a kilo prefix for other units
            if prefix == "K" and unit == "K":
                break
            if prefix in PREFIXES:
                # decimal scaling keeps "160 uW" exactly 160e-6
                return float(Decimal(m.group(1)).scaleb(round(math.log10(PREFIXES[prefix]))))
            break
    raise UnitError(f"unit of {text!r} is not {unit}")


_ENG = [
    (1e12, "T"),
    (1e9, "G"),
    (1e6, "M"),
    (1e3, "k"),
    (1.0, ""),
    (1e-3, "m"),
    (1e-6, "u"),
    (1e-9, "n"),
    (1e-12, "p"),
    (1e-15, "f"),
    (1e-18, "a"),
    (1e-21, "z"),
]


def format_eng(value: float, unit: str, digits: int = 3) -> str:
    """Engineering notation for human-readable reports, e.g. ``1.67e-6 W -> '1.67 uW'``."""
    if value == 0:
        return f"0 {unit}"
    mag = abs(value)
    for scale, prefix in _ENG:
        if mag >= scale * (1 - 1e-12):
            break
    scaled = value / scale
    text = f"{scaled:.{digits}g}"
    return f"{text} {prefix}{unit}"


def format_count(n: int) -> str:
    """Compact gate counts: 1 K, 10 K, 1 M, 100 M."""
    for scale, suffix in ((10**9, "G"), (10**6, "M"), (10**3, "K")):
        if n >= scale and n % scale == 0:
            return f"{n // scale} {suffix}"
    return str(n)
