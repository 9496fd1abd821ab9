"""The rotating-frame control vector."""

from __future__ import annotations

import math
from typing import NamedTuple


class EffectiveField(NamedTuple):
    """Control vector B = (omega_x, omega_y, delta), all in rad/s.

    ``omega_x + 1j*omega_y = Omega * exp(1j*theta)`` is the drive amplitude
    at microwave phase theta, and ``delta`` is the detuning.
    """

    omega_x: float
    omega_y: float
    delta: float

    @property
    def magnitude(self) -> float:
        """|B|, the instantaneous level splitting."""
        return math.sqrt(self.omega_x ** 2 + self.omega_y ** 2 + self.delta ** 2)
