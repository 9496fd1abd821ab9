"""Unit-suffixed quantities.

Text quantities carry a mandatory suffix that fixes both the physical kind
and the scale factor to internal units:

========  ==========  ===========================================
kind      suffixes    internal unit
========  ==========  ===========================================
time      ns, us, s   seconds
frequency MHz, GHz    rad/s (the text value is a cyclic frequency)
          rad/s       rad/s (angular, written only when needed for
                      an exact round trip)
angle     deg, rad,   radians
          pi          (``0.5pi`` means pi/2)
========  ==========  ===========================================

Conversion to angular units happens here and nowhere else.
"""

from __future__ import annotations

import math
import re
from typing import NamedTuple

from .errors import UnitError

TWO_PI = 2.0 * math.pi

#: suffix -> (kind, scale, angular). internal = number * scale, or
#: ``(number * scale) / divisor`` for negative powers of ten, then times
#: 2 pi for cyclic frequencies. The order of operations matches how a
#: caller writes ``2 * math.pi * 20e6`` or ``25e-9`` so both spellings give
#: the same float.
UNITS: dict[str, tuple[str, float, bool]] = {
    "ns": ("time", 1e-9, False),
    "us": ("time", 1e-6, False),
    "s": ("time", 1.0, False),
    "MHz": ("frequency", 1e6, True),
    "GHz": ("frequency", 1e9, True),
    "rad/s": ("frequency", 1.0, False),
    "deg": ("angle", math.pi / 180.0, False),
    "rad": ("angle", 1.0, False),
    "pi": ("angle", math.pi, False),
}


def _to_internal(number: float, suffix: str) -> float:
    _, scale, angular = UNITS[suffix]
    if scale < 1.0 and suffix in ("ns", "us"):
        # exact integer divisor gives the correctly rounded decimal
        value = number / round(1.0 / scale)
    else:
        value = number * scale
    return TWO_PI * value if angular else value


def _from_internal(value: float, suffix: str) -> float:
    _, scale, angular = UNITS[suffix]
    if angular:
        value = value / TWO_PI
    if scale < 1.0 and suffix in ("ns", "us"):
        return value * round(1.0 / scale)
    return value / scale


#: preferred suffix when writing a value of each kind back to text
CANONICAL_SUFFIX = {"time": "ns", "frequency": "MHz", "angle": "rad"}
#: suffix with factor 1, used when the canonical one cannot round-trip
EXACT_SUFFIX = {"time": "s", "frequency": "rad/s", "angle": "rad"}

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class Quantity(NamedTuple):
    """A parsed quantity in internal units."""

    value: float
    kind: str


def parse_quantity(text: str, kind: str | None = None, *, line: int | None = None,
                   column: int = 1) -> Quantity:
    """Parse ``<number><suffix>`` into internal units.

    Parameters
    ----------
    text : str
        The quantity, e.g. ``"25ns"``, ``"20MHz"``, ``"0.5pi"``.
    kind : {"time", "frequency", "angle"}, optional
        Required kind. A suffix of another kind raises `UnitError`.
    line, column : int, optional
        Location of ``text`` inside a larger document; used only to report
        error positions. ``column`` is the 1-based column of ``text[0]``.

    Returns
    -------
    Quantity

    Raises
    ------
    UnitError
        Missing number, missing or unknown suffix, or kind mismatch. The
        error column points at the offending character.
    """
    if not text:
        raise UnitError("empty quantity", line, column)
    m = _NUMBER.match(text)
    if m is None:
        raise UnitError(f"expected a number in {text!r}", line, column)
    suffix = text[m.end():]
    where = column + m.end()
    if not suffix:
        raise UnitError(f"missing unit suffix in {text!r}", line, where)
    if suffix not in UNITS:
        raise UnitError(f"unknown unit {suffix!r}", line, where)
    found = UNITS[suffix][0]
    if kind is not None and found != kind:
        raise UnitError(f"expected a {kind} but {suffix!r} is a {found} unit", line, where)
    number = float(m.group())
    if not math.isfinite(number):
        raise UnitError(f"non-finite number in {text!r}", line, column)
    return Quantity(_to_internal(number, suffix), found)


def format_quantity(value: float, kind: str) -> str:
    """Write ``value`` (internal units) so that `parse_quantity` returns it bit-exactly.

    The number is scaled to the readable suffix of ``kind`` (ns, MHz, rad)
    and the shortest decimal that converts back to exactly ``value`` is
    written. When no decimal does (the scale factor is inexact in binary),
    the unscaled SI form (``s`` or ``rad/s``) is written, which is always
    exact.
    """
    value = float(value)
    suffix = CANONICAL_SUFFIX[kind]
    x = _from_internal(value, suffix)
    for digits in range(1, 18):
        c = float(f"{x:.{digits}g}")
        if _to_internal(c, suffix) == value:
            return f"{c!r}{suffix}"
    return f"{value!r}{EXACT_SUFFIX[kind]}"
