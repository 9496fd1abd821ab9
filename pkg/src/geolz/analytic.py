"""Closed-form Landau-Zener results and the adiabatic-impulse model.

A sweep through an avoided crossing with minimum gap Delta at angular
sweep rate alpha (the rate at which the diabatic splitting changes, rad/s^2)
leaves the system in the diabatic state with probability

    p = exp(-pi Delta^2 / (2 alpha)) = exp(-2 pi delta_s),
    delta_s = Delta^2 / (4 alpha).

Two crossings separated by a spin echo, with an azimuthal field excursion
theta in between, interfere to give

    P1 = 1 - 4 p (1 - p) sin^2(theta).

The adiabatic-impulse model reproduces this from transfer matrices; it
treats the crossings as instantaneous and everything else as adiabatic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptySeries
from .special import loggamma


@dataclass(frozen=True)
class LzCrossingParams:
    """Gap Delta (rad/s) and angular sweep rate alpha (rad/s^2) of one crossing."""

    gap: float
    sweep_rate: float

    def __post_init__(self):
        if not self.gap >= 0:
            raise ValueError(f"gap must be non-negative, got {self.gap!r}")
        if not self.sweep_rate > 0:
            raise ValueError(f"sweep_rate must be positive, got {self.sweep_rate!r}")

    @classmethod
    def from_sweep(cls, gap: float, omega_1: float, omega_2: float,
                   tau_p: float) -> "LzCrossingParams":
        """Crossing from a linear sweep of the splitting from omega_1 to omega_2 in tau_p."""
        return cls(gap, abs(omega_1 - omega_2) / tau_p)

    @property
    def adiabaticity(self) -> float:
        """delta_s = Delta^2 / (4 alpha)."""
        return self.gap ** 2 / (4.0 * self.sweep_rate)


def lz_probability(params: LzCrossingParams) -> float:
    """Diabatic transition probability exp(-pi Delta^2 / (2 alpha))."""
    return math.exp(-math.pi * params.gap ** 2 / (2.0 * params.sweep_rate))


def glzi_population(p, theta):
    """Excited population 1 - 4 p (1 - p) sin^2(theta) after an echoed double crossing.

    Works elementwise on arrays.
    """
    val = 1.0 - 4.0 * np.asarray(p) * (1.0 - np.asarray(p)) * np.sin(theta) ** 2
    return float(val) if np.ndim(val) == 0 else val


def stokes_phase(delta_s: float) -> float:
    """Stokes phase pi/4 + delta_s (ln delta_s - 1) + arg Gamma(1 - i delta_s).

    ``arg Gamma`` is taken on the continuous branch (imaginary part of
    log Gamma). At ``delta_s = 0`` the sudden-limit value pi/4 is returned.
    The phase falls monotonically towards zero in the adiabatic limit.
    """
    if delta_s < 0:
        raise ValueError("delta_s must be non-negative")
    if delta_s == 0:
        return math.pi / 4
    return (math.pi / 4 + delta_s * (math.log(delta_s) - 1.0)
            + loggamma(complex(1.0, -delta_s)).imag)


@dataclass(frozen=True)
class ImpulseModelInputs:
    """Inputs to `adiabatic_impulse_p1`.

    Parameters
    ----------
    p : float
        Diabatic transition probability at each crossing.
    theta : float
        Azimuth of the field excursion between the crossings (radians).
    zeta1, zeta2 : float
        Dynamical phases accumulated before and after the echo instant
        (radians, integral of the level splitting).
    stokes_phase : float
        Stokes phase of each crossing.
    echo : bool
        Whether a pi pulse swaps the adiabatic states at the midpoint.
    """

    p: float
    theta: float = 0.0
    zeta1: float = 0.0
    zeta2: float = 0.0
    stokes_phase: float = 0.0
    echo: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")


def crossing_matrix(p: float, phi_s: float) -> np.ndarray:
    """Transfer matrix of one crossing in the adiabatic basis (ground, excited).

    ``[[sqrt(1-p) e^{-i phi}, -sqrt(p)], [sqrt(p), sqrt(1-p) e^{i phi}]]`` with
    the shifted phase ``phi = phi_s - pi/2``. The shift makes the unechoed
    double crossing agree with direct integration of the Schrodinger
    equation; using ``phi_s`` itself puts the fringe exactly out of phase.
    """
    a, b = math.sqrt(1.0 - p), math.sqrt(p)
    phi = phi_s - 0.5 * math.pi
    return np.array([[a * np.exp(-1j * phi), -b], [b, a * np.exp(1j * phi)]])


def _phase_matrix(chi: float) -> np.ndarray:
    return np.diag([np.exp(-1j * chi), np.exp(1j * chi)])


def adiabatic_impulse_p1(inputs: ImpulseModelInputs) -> float:
    """Excited population from the transfer-matrix product.

    Starting in the adiabatic ground state the sequence is: crossing;
    relative adiabatic phase ``zeta1/2 + theta/2`` (dynamical plus the
    outgoing azimuthal excursion); optional echo sigma_x; relative phase
    ``zeta2/2 - theta/2`` (returning excursion); crossing. The population
    of the final adiabatic excited state is returned.

    With the echo this gives ``1 - 4p(1-p) sin^2(theta + (zeta1 - zeta2)/2)``.
    It is independent of the Stokes phase and of any dynamical phase common
    to both halves. Without it the result is
    ``4p(1-p) sin^2((zeta1 + zeta2)/2 + phi_s)``.
    """
    n = crossing_matrix(inputs.p, inputs.stokes_phase)
    u = _phase_matrix(0.5 * (inputs.zeta1 + inputs.theta))
    if inputs.echo:
        u = np.array([[0, 1], [1, 0]]) @ u
    u = _phase_matrix(0.5 * (inputs.zeta2 - inputs.theta)) @ u
    psi = n @ u @ n @ np.array([1.0, 0.0])
    return float(abs(psi[1]) ** 2)


def contrast(series: Sequence[float]) -> float:
    """max - min of a fringe.

    Raises
    ------
    EmptySeries
    """
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        raise EmptySeries("contrast of an empty series")
    return float(arr.max() - arr.min())
