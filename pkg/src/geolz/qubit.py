"""Flux-biased phase-qubit potential and its level spacing.

The qubit is the lowest pair of levels in a shallow well of

    U(phi) = -E_J cos(phi) + E_L (phi - phi_ex)**2,

with E_C, E_J, E_L expressed as angular frequencies (energy / hbar).
The small-oscillation frequency around the well minimum,

    omega = sqrt(2 E_C (E_J cos(phi_min) + 2 E_L)),

is the qubit transition frequency, and sweeping the external flux
``phi_ex`` tunes it. That is how the detuning of a fixed microwave drive is
set experimentally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy import constants as _const

from .errors import (BiasPointError, DegenerateWell, ImaginaryFrequency, NoRootInBracket,
                     NotMonotonic, QubitModelError, TargetOutOfRange)

#: Reduced flux quantum hbar / (2e), in webers.
REDUCED_FLUX_QUANTUM = _const.hbar / (2.0 * _const.e)

_TWO_PI = 2.0 * math.pi


def charging_energy(capacitance: float) -> float:
    """E_C = (2e)^2 / (2C), returned in rad/s."""
    return (2.0 * _const.e) ** 2 / (2.0 * capacitance) / _const.hbar


def josephson_energy(critical_current: float) -> float:
    """E_J = I_c * Phi_0 / (2 pi), returned in rad/s."""
    return critical_current * REDUCED_FLUX_QUANTUM / _const.hbar


def inductance_energy(inductance: float) -> float:
    """E_L = (Phi_0 / 2 pi)^2 / (2L), returned in rad/s."""
    return REDUCED_FLUX_QUANTUM ** 2 / (2.0 * inductance) / _const.hbar


@dataclass(frozen=True)
class PhaseQubitParams:
    """Circuit energies (rad/s) and flux bias (rad) of a phase qubit.

    Parameters
    ----------
    charging_energy, josephson_energy, inductance_energy : float
        E_C, E_J, E_L in rad/s. All must be positive.
    external_flux : float
        phi_ex in radians.
    capacitance, inductance, critical_current : float, optional
        Raw circuit values in SI units. When given they must reproduce the
        energies to 1e-12 relative; use `from_circuit` to build from them.
    """

    charging_energy: float
    josephson_energy: float
    inductance_energy: float
    external_flux: float = 0.0
    capacitance: float | None = None
    inductance: float | None = None
    critical_current: float | None = None

    def __post_init__(self):
        for name in ("charging_energy", "josephson_energy", "inductance_energy"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise QubitModelError(f"{name} must be positive and finite, got {v!r}")
        if not math.isfinite(self.external_flux):
            raise QubitModelError("external_flux must be finite")
        checks = ((self.capacitance, charging_energy, self.charging_energy, "capacitance"),
                  (self.critical_current, josephson_energy, self.josephson_energy,
                   "critical_current"),
                  (self.inductance, inductance_energy, self.inductance_energy, "inductance"))
        for raw, fn, energy, name in checks:
            if raw is None:
                continue
            expected = fn(raw)
            if abs(expected - energy) > 1e-12 * abs(expected):
                raise QubitModelError(f"{name}={raw!r} is inconsistent with the given energy")

    @classmethod
    def from_circuit(cls, capacitance: float, inductance: float, critical_current: float,
                     external_flux: float = 0.0) -> "PhaseQubitParams":
        """Derive the energies from C (F), L (H) and I_c (A)."""
        return cls(charging_energy(capacitance), josephson_energy(critical_current),
                   inductance_energy(inductance), external_flux,
                   capacitance, inductance, critical_current)

    def with_flux(self, external_flux: float) -> "PhaseQubitParams":
        """Copy with a different flux bias."""
        return replace(self, external_flux=float(external_flux))


class WellGeometry(NamedTuple):
    """Stationary points of the qubit well.

    Attributes
    ----------
    phi_min, phi_max : float
        Well minimum and the adjacent barrier maximum (radians).
    curvature_at_min : float
        ``2 E_C U''(phi_min)`` in rad^2/s^2, the square of the level spacing.
    """

    phi_min: float
    phi_max: float
    curvature_at_min: float


#: Default circuit: C = 0.7 pF, L = 0.8 nH, I_c = 2 uA. Chosen so the
#: spacing falls monotonically through 14.4, 14.3 and 14.2 GHz well inside
#: `DEFAULT_BIAS_INTERVAL`; not a measured device.
DEFAULT_PARAMS = PhaseQubitParams.from_circuit(0.7e-12, 0.8e-9, 2e-6)

#: Flux window (radians) where the default circuit is calibrated.
DEFAULT_BIAS_INTERVAL = (3.0, 4.5)

#: Operating points of the interferometer as level spacings (rad/s).
OPERATING_POINTS = {"S": _TWO_PI * 14.4e9, "M": _TWO_PI * 14.3e9, "F": _TWO_PI * 14.2e9}


def potential_energy(phi, params: PhaseQubitParams):
    """U(phi) = -E_J cos(phi) + E_L (phi - phi_ex)^2 in rad/s. Accepts arrays."""
    phi = np.asarray(phi, dtype=float)
    u = (-params.josephson_energy * np.cos(phi)
         + params.inductance_energy * (phi - params.external_flux) ** 2)
    return float(u) if u.ndim == 0 else u


def potential_slope(phi, params: PhaseQubitParams):
    """dU/dphi = E_J sin(phi) + 2 E_L (phi - phi_ex)."""
    phi = np.asarray(phi, dtype=float)
    f = (params.josephson_energy * np.sin(phi)
         + 2.0 * params.inductance_energy * (phi - params.external_flux))
    return float(f) if f.ndim == 0 else f


def potential_curvature(phi, params: PhaseQubitParams):
    """d2U/dphi2 = E_J cos(phi) + 2 E_L."""
    phi = np.asarray(phi, dtype=float)
    c = params.josephson_energy * np.cos(phi) + 2.0 * params.inductance_energy
    return float(c) if c.ndim == 0 else c


def _refine_root(a: float, b: float, params: PhaseQubitParams) -> float:
    """Bisect a sign-change bracket to machine precision, then polish by Newton."""
    fa = potential_slope(a, params)
    if fa == 0.0:
        return a
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = potential_slope(m, params)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    x = 0.5 * (a + b)
    lo, hi = min(a, b), max(a, b)
    for _ in range(3):
        d = potential_curvature(x, params)
        if d == 0.0:
            break
        step = potential_slope(x, params) / d
        nx = x - step
        if not lo <= nx <= hi:
            break
        x = nx
    return x


def _stationary_roots(params: PhaseQubitParams, bracket: tuple[float, float],
                      scan_points: int) -> list[float]:
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise ValueError("bracket must satisfy lo < hi")
    grid = np.linspace(lo, hi, scan_points)
    f = potential_slope(grid, params)
    roots = []
    for i in range(scan_points - 1):
        if f[i] == 0.0:
            roots.append(float(grid[i]))
        elif f[i + 1] != 0.0 and (f[i] > 0) != (f[i + 1] > 0):
            roots.append(_refine_root(float(grid[i]), float(grid[i + 1]), params))
    if f[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _classify(roots, params):
    ej = params.josephson_energy
    out = []
    for r in roots:
        c = potential_curvature(r, params)
        if abs(c) < 1e-9 * ej:
            raise DegenerateWell(f"inflection at phi={r!r} (curvature {c!r})")
        out.append((r, c))
    return out


def well_minimum(params: PhaseQubitParams,
                 bracket: tuple[float, float] = (0.0, 2.0 * math.pi),
                 scan_points: int = 4097) -> float:
    """First potential minimum in ``bracket`` (radians).

    Raises
    ------
    NoRootInBracket, DegenerateWell
    """
    for r, c in _classify(_stationary_roots(params, bracket, scan_points), params):
        if c > 0:
            return r
    raise NoRootInBracket(f"no potential minimum in {bracket!r}")


def stationary_phase_points(params: PhaseQubitParams,
                            bracket: tuple[float, float] = (0.0, 2.0 * math.pi),
                            scan_points: int = 4097) -> WellGeometry:
    """Locate the well minimum and its neighbouring barrier maximum.

    The slope dU/dphi is scanned on a uniform grid over ``bracket``; every
    sign change is refined by bisection and Newton polishing. The first
    minimum in the bracket and the first maximum after it are returned.

    Parameters
    ----------
    params : PhaseQubitParams
    bracket : (float, float)
        Search interval in radians.
    scan_points : int
        Grid size for the sign-change scan. Stationary pairs closer than
        one grid step can be missed.

    Returns
    -------
    WellGeometry

    Raises
    ------
    NoRootInBracket
        No minimum, or no maximum after the minimum, in the bracket.
    DegenerateWell
        The curvature at a found root is below 1e-9 E_J in magnitude.
    """
    phi_min = phi_max = None
    for r, c in _classify(_stationary_roots(params, bracket, scan_points), params):
        if phi_min is None:
            if c > 0:
                phi_min = r
        elif c < 0:
            phi_max = r
            break
    if phi_min is None:
        raise NoRootInBracket(f"no potential minimum in {bracket!r}")
    if phi_max is None:
        raise NoRootInBracket(f"no potential maximum after phi_min={phi_min!r} in {bracket!r}")
    curvature = 2.0 * params.charging_energy * potential_curvature(phi_min, params)
    return WellGeometry(phi_min, phi_max, curvature)


def level_spacing(params: PhaseQubitParams,
                  bracket: tuple[float, float] = (0.0, 2.0 * math.pi)) -> float:
    """Small-oscillation frequency of the well, in rad/s.

    Only the minimum is needed, so a barrier-free (nearly harmonic)
    potential is accepted.

    Raises
    ------
    NoRootInBracket, DegenerateWell
        From the minimum search.
    ImaginaryFrequency
        If ``E_J cos(phi_min) + 2 E_L`` is not positive.
    """
    phi_min = well_minimum(params, bracket)
    radicand = 2.0 * params.charging_energy * potential_curvature(phi_min, params)
    if not radicand > 0:
        raise ImaginaryFrequency(f"radicand {radicand!r} at phi_min={phi_min!r}")
    return math.sqrt(radicand)


def spectroscopy_curve(params: PhaseQubitParams, biases: Sequence[float],
                       bracket: tuple[float, float] = (0.0, 2.0 * math.pi)
                       ) -> list[tuple[float, float]]:
    """Level spacing at each flux bias.

    Returns
    -------
    list of (phi_ex, omega)

    Raises
    ------
    BiasPointError
        Wrapping the well error of the first bias that fails.
    """
    out = []
    for b in biases:
        b = float(b)
        try:
            out.append((b, level_spacing(params.with_flux(b), bracket)))
        except QubitModelError as exc:
            raise BiasPointError(b, exc) from exc
    return out


def calibrate_bias(params: PhaseQubitParams, target: float,
                   interval: tuple[float, float] = DEFAULT_BIAS_INTERVAL,
                   scan_points: int = 65, tolerance: float = _TWO_PI * 1.0,
                   bracket: tuple[float, float] = (0.0, 2.0 * math.pi)) -> float:
    """Flux bias whose level spacing equals ``target``.

    The spacing is scanned over ``interval`` to check strict monotonicity
    and to bracket the target, and the bracket is bisected until the
    spacing is within ``tolerance`` (rad/s, default 2 pi x 1 Hz).

    Parameters
    ----------
    params : PhaseQubitParams
        The flux field is ignored.
    target : float
        Desired spacing in rad/s.
    interval : (float, float)
        Flux search window in radians.
    bracket : (float, float)
        Phase bracket for locating the well at each bias.

    Raises
    ------
    NotMonotonic
        If the scanned spacing is not strictly monotonic.
    TargetOutOfRange
        If ``target`` lies outside the scanned spacing range.
    """
    lo, hi = float(interval[0]), float(interval[1])
    grid = np.linspace(lo, hi, scan_points)
    w = np.array([w for _, w in spectroscopy_curve(params, grid, bracket)])
    dw = np.diff(w)
    if not (np.all(dw > 0) or np.all(dw < 0)):
        raise NotMonotonic(f"level spacing is not monotonic on {interval!r}")
    for g, wg in ((lo, w[0]), (hi, w[-1])):
        if abs(wg - target) <= tolerance:
            return g
    if not min(w[0], w[-1]) < target < max(w[0], w[-1]):
        raise TargetOutOfRange(
            f"target {target / _TWO_PI:.6g} Hz outside [{min(w) / _TWO_PI:.6g}, "
            f"{max(w) / _TWO_PI:.6g}] Hz on {interval!r}")
    k = int(np.searchsorted(w if dw[0] > 0 else -w, target if dw[0] > 0 else -target))
    a, b = float(grid[k - 1]), float(grid[k])
    wa = w[k - 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        wm = level_spacing(params.with_flux(m), bracket)
        if abs(wm - target) <= tolerance or m in (a, b):
            return m
        if (wm > target) == (wa > target):
            a, wa = m, wm
        else:
            b = m
    return 0.5 * (a + b)


def operating_biases(params: PhaseQubitParams = DEFAULT_PARAMS,
                     interval: tuple[float, float] = DEFAULT_BIAS_INTERVAL) -> dict[str, float]:
    """Calibrated flux bias for each named operating point."""
    return {name: calibrate_bias(params, w, interval) for name, w in OPERATING_POINTS.items()}


def detuning(params: PhaseQubitParams, drive_frequency: float) -> float:
    """Rotating-frame detuning ``omega - omega_drive`` (rad/s) at the current bias."""
    return level_spacing(params) - drive_frequency
