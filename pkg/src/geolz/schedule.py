"""Control programs: piecewise-linear field segments plus instantaneous gates.

A `Schedule` is an ordered list of `Segment` objects, each holding a linear
ramp of detuning delta and microwave phase theta at constant drive amplitude
Omega, and a time-sorted list of `InstantGate` rotations. Segments occupy
half-open intervals ``[start, end)``, so a boundary instant belongs to the
later segment. A gate sitting on a boundary fires before that later segment
starts.

The text form is line oriented::

    # comment
    segment dur=25ns delta0=100MHz delta1=-100MHz omega=20MHz phase0=0rad
    gate at=37.5ns axis=y angle=1pi

Frequencies in text are cyclic (MHz, GHz); internally everything is angular.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from itertools import accumulate
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import (InvalidTiming, NegativeDuration, OutOfRange, ScheduleError,
                     ScheduleSyntaxError, UnitError, UnknownKey)
from .field import EffectiveField
from .units import format_quantity, parse_quantity

_AXES = {"x": 0.0, "y": math.pi / 2}


@dataclass(frozen=True)
class Segment:
    """One linear ramp of the rotating-frame field.

    Parameters
    ----------
    duration : float
        Seconds, strictly positive.
    delta_start, delta_end : float
        Detuning at the two ends (rad/s). ``delta_end`` defaults to
        ``delta_start``.
    omega : float
        Drive amplitude Omega (rad/s), non-negative, constant in the segment.
    phase_start, phase_end : float
        Microwave phase at the two ends (radians). ``phase_end`` defaults to
        ``phase_start``.
    """

    duration: float
    delta_start: float
    delta_end: float | None = None
    omega: float = 0.0
    phase_start: float = 0.0
    phase_end: float | None = None

    def __post_init__(self):
        if self.delta_end is None:
            object.__setattr__(self, "delta_end", self.delta_start)
        if self.phase_end is None:
            object.__setattr__(self, "phase_end", self.phase_start)
        for name in ("duration", "delta_start", "delta_end", "omega", "phase_start", "phase_end"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ScheduleError(f"segment {name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not self.duration > 0:
            raise NegativeDuration(f"segment duration must be positive, got {self.duration!r}")
        if self.omega < 0:
            raise ScheduleError(f"segment omega must be non-negative, got {self.omega!r}")

    def field_at(self, tau):
        """Field components at local time(s) ``tau`` measured from the segment start.

        Returns
        -------
        (omega_x, omega_y, delta) : tuple of float or ndarray
        """
        s = np.asarray(tau, dtype=float) / self.duration
        delta = self.delta_start + (self.delta_end - self.delta_start) * s
        theta = self.phase_start + (self.phase_end - self.phase_start) * s
        return self.omega * np.cos(theta), self.omega * np.sin(theta), delta


@dataclass(frozen=True)
class InstantGate:
    """Instantaneous rotation by ``angle`` about an in-plane axis.

    ``axis`` may be ``"x"``, ``"y"`` or an azimuth in radians measured from
    x towards y; it is stored as the azimuth.
    """

    time: float
    axis: float
    angle: float

    def __post_init__(self):
        axis = self.axis
        if isinstance(axis, str):
            if axis not in _AXES:
                raise ScheduleError(f"gate axis must be 'x', 'y' or an azimuth, got {axis!r}")
            axis = _AXES[axis]
        object.__setattr__(self, "axis", float(axis))
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "angle", float(self.angle))
        for name in ("time", "axis", "angle"):
            if not math.isfinite(getattr(self, name)):
                raise ScheduleError(f"gate {name} must be finite")
        if self.time < 0:
            raise InvalidTiming(f"gate time must be non-negative, got {self.time!r}")


@dataclass(frozen=True)
class Schedule:
    """Immutable control program.

    Parameters
    ----------
    segments : sequence of Segment
    gates : sequence of InstantGate
        Sorted stably by time on construction; every gate must lie in
        ``[0, total_duration]``.
    annotations : mapping, optional
        Protocol bookkeeping set by the builders (``tau_p``, ``tau_s``,
        ``tau_c``, ``tau_1``, ``tau_2``). Not part of equality.
    """

    segments: tuple[Segment, ...]
    gates: tuple[InstantGate, ...] = ()
    annotations: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        gates = tuple(sorted(self.gates, key=lambda g: g.time))
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "annotations", MappingProxyType(dict(self.annotations)))
        bounds = (0.0,) + tuple(accumulate(s.duration for s in segs))
        object.__setattr__(self, "_bounds", bounds)
        for g in gates:
            if g.time > bounds[-1]:
                raise InvalidTiming(f"gate at {g.time!r} s is after the schedule end {bounds[-1]!r} s")

    @property
    def total_duration(self) -> float:
        """Sum of segment durations, tau_C for the interferometry protocols."""
        return self._bounds[-1]

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Segment start times followed by the end time."""
        return self._bounds

    @property
    def cycle_frequency(self) -> float:
        """omega_C = 2 pi / tau_C in rad/s."""
        return 2.0 * math.pi / self.total_duration

    def crossing_times(self) -> tuple[float, ...]:
        """Times where the detuning changes sign.

        A sign change strictly inside a ramp is located by linear
        interpolation. A ramp that ends exactly at zero counts when the
        detuning on the other side has the opposite sign.
        """
        out = []
        prev_sign = 0
        for seg, t0 in zip(self.segments, self._bounds):
            ds, de = seg.delta_start, seg.delta_end
            s0 = (ds > 0) - (ds < 0)
            s1 = (de > 0) - (de < 0)
            if s0 == 0 and prev_sign != 0 and s1 == -prev_sign:
                out.append(t0)
            elif s0 * s1 < 0:
                out.append(t0 + seg.duration * ds / (ds - de))
            if s1 != 0:
                prev_sign = s1
            elif s0 != 0:
                prev_sign = s0
        return tuple(out)

    def segment_index(self, t: float) -> int:
        """Index of the segment containing ``t`` (half-open intervals)."""
        if not 0.0 <= t < self.total_duration:
            raise OutOfRange(f"t={t!r} s outside [0, {self.total_duration!r})")
        return bisect.bisect_right(self._bounds, t) - 1

    def field_before(self, t: float) -> EffectiveField:
        """Left limit of the field at ``t`` in (0, total_duration]."""
        if not 0.0 < t <= self.total_duration:
            raise OutOfRange(f"t={t!r} s outside (0, {self.total_duration!r}]")
        i = bisect.bisect_left(self._bounds, t) - 1
        seg = self.segments[i]
        ox, oy, d = seg.field_at(t - self._bounds[i])
        return EffectiveField(float(ox), float(oy), float(d))


def sample_field(schedule: Schedule, t: float) -> EffectiveField:
    """Field (Omega cos theta, Omega sin theta, delta) at time ``t``.

    Raises
    ------
    OutOfRange
        For ``t`` outside ``[0, total_duration)``.
    """
    i = schedule.segment_index(t)
    seg = schedule.segments[i]
    ox, oy, d = seg.field_at(t - schedule.boundaries[i])
    return EffectiveField(float(ox), float(oy), float(d))


# --- protocol builders -----------------------------------------------------

def _check_cycle(delta0: float, tau_p: float, tau_c: float) -> float:
    if not delta0 > 0:
        raise InvalidTiming(f"delta0 must be positive, got {delta0!r}")
    if not tau_p > 0:
        raise InvalidTiming(f"tau_p must be positive, got {tau_p!r}")
    if not tau_c > 2.0 * tau_p:
        raise InvalidTiming(f"tau_c={tau_c!r} s must exceed 2*tau_p={2 * tau_p!r} s")
    return 0.5 * (tau_c - 2.0 * tau_p)


def _cycle(delta0, omega, tau_p, tau_c, f_phase):
    """Five-segment cycle shared by the geometric and dynamical protocols.

    ``f_phase`` gives the phase ramps (start, end) of the two halves of the
    far-detuned plateau; every other segment holds ``f_phase[2]``.
    """
    plateau = _check_cycle(delta0, tau_p, tau_c)
    half = 0.5 * plateau
    (a0, a1), (b0, b1), rest = f_phase
    segs = (
        Segment(tau_p, delta0, -delta0, omega, rest, rest),
        Segment(half, -delta0, -delta0, omega, a0, a1),
        Segment(half, -delta0, -delta0, omega, b0, b1),
        Segment(tau_p, -delta0, delta0, omega, rest, rest),
        Segment(plateau, delta0, delta0, omega, rest, rest),
    )
    t_echo = tau_p + half
    notes = {"tau_p": tau_p, "tau_c": tau_c, "tau_s": t_echo,
             "tau_1": 0.5 * tau_p, "tau_2": tau_p + plateau + 0.5 * tau_p}
    return segs, t_echo, notes


def build_glzi(delta0: float, omega: float, theta: float, tau_p: float, tau_c: float) -> Schedule:
    """Geometric interferometry cycle with a spin echo.

    Timeline (total ``tau_c``, plateau ``P = (tau_c - 2 tau_p)/2``):

    1. ``tau_p``: delta ramps +delta0 -> -delta0 at phase 0 (first crossing at
       ``tau_p/2``).
    2. ``P/2``: delta held at -delta0 while the phase ramps 0 -> theta.
    3. Echo: pi rotation about azimuth ``theta + pi/2``, perpendicular to the
       drive at that instant, at ``tau_s = tau_p + P/2``.
    4. ``P/2``: phase ramps back theta -> 0.
    5. ``tau_p``: delta ramps -delta0 -> +delta0 at phase 0 (second crossing).
    6. ``P``: delta held at +delta0, phase 0, closing the loop.

    The azimuthal excursion between the crossings is the only place theta
    enters, so the population encodes a purely geometric phase. The
    microwave phase is only defined modulo 2 pi, so the excursion takes the
    shorter way round: theta is wrapped into (-pi, pi] before building the
    ramps and the echo axis. The requested value is kept in
    ``annotations["theta"]`` and the wrapped one in
    ``annotations["excursion"]``.

    Raises
    ------
    InvalidTiming
        If ``tau_c <= 2 tau_p`` or ``delta0 <= 0``.
    """
    theta = float(theta)
    exc = math.remainder(theta, 2.0 * math.pi)
    if exc == -math.pi:
        exc = math.pi
    segs, t_echo, notes = _cycle(delta0, omega, tau_p, tau_c, ((0.0, exc), (exc, 0.0), 0.0))
    notes["theta"] = theta
    notes["excursion"] = exc
    gate = InstantGate(t_echo, exc + 0.5 * math.pi, math.pi)
    return Schedule(segs, (gate,), notes)


def build_dlzi(delta0: float, omega: float, theta_const: float, tau_p: float,
               tau_c: float) -> Schedule:
    """Dynamical interferometry cycle: the GLZI timeline at a constant phase, no echo.

    ``theta_const`` is stored reduced modulo 2 pi. Changing ``tau_c`` only
    stretches the two plateaus.
    """
    th = math.fmod(float(theta_const), 2.0 * math.pi)
    if th < 0:
        th += 2.0 * math.pi
    segs, _, notes = _cycle(delta0, omega, tau_p, tau_c, ((th, th), (th, th), th))
    notes["theta"] = th
    return Schedule(segs, (), notes)


def build_t1(delay: float) -> Schedule:
    """Energy-relaxation probe: x pi rotation at t = 0, then free decay for ``delay``.

    A zero delay gives a gate-only schedule of zero duration.
    """
    if delay < 0:
        raise InvalidTiming(f"delay must be non-negative, got {delay!r}")
    segs = (Segment(delay, 0.0),) if delay > 0 else ()
    return Schedule(segs, (InstantGate(0.0, "x", math.pi),), {"tau_c": float(delay)})


def build_t2_echo(tau: float) -> Schedule:
    """Hahn echo: x pi/2, free ``tau``, x pi, free ``tau``, x pi/2."""
    if tau < 0:
        raise InvalidTiming(f"tau must be non-negative, got {tau!r}")
    segs = (Segment(tau, 0.0), Segment(tau, 0.0)) if tau > 0 else ()
    total = sum(s.duration for s in segs)
    gates = (InstantGate(0.0, "x", 0.5 * math.pi), InstantGate(segs[0].duration if segs else 0.0,
                                                               "x", math.pi),
             InstantGate(total, "x", 0.5 * math.pi))
    return Schedule(segs, gates, {"tau_c": total, "tau_s": float(tau)})


# --- text form -------------------------------------------------------------

_SEGMENT_KEYS = {"dur": "time", "delta0": "frequency", "delta1": "frequency",
                 "omega": "frequency", "phase0": "angle", "phase1": "angle"}
_GATE_KEYS = {"at": "time", "axis": "axis", "angle": "angle"}
_TOKEN = re.compile(r"\S+")


def _pairs(line: str, lineno: int, tokens, allowed: Mapping[str, str]) -> dict:
    values: dict[str, tuple[float, int]] = {}
    for m in tokens:
        tok, col = m.group(), m.start() + 1
        eq = tok.find("=")
        if eq <= 0:
            raise ScheduleSyntaxError(f"expected key=value, got {tok!r}", lineno, col)
        key, raw = tok[:eq], tok[eq + 1:]
        if key not in allowed:
            raise UnknownKey(f"unknown key {key!r}", lineno, col)
        if key in values:
            raise ScheduleSyntaxError(f"duplicate key {key!r}", lineno, col)
        vcol = col + eq + 1
        if not raw:
            raise ScheduleSyntaxError(f"missing value for {key!r}", lineno, vcol)
        kind = allowed[key]
        if kind == "axis":
            value = _AXES[raw] if raw in _AXES else parse_quantity(raw, "angle", line=lineno,
                                                                   column=vcol).value
        else:
            value = parse_quantity(raw, kind, line=lineno, column=vcol).value
        values[key] = (value, vcol)
    return values


def parse_schedule(text: str) -> Schedule:
    """Parse schedule text into a `Schedule` in internal units.

    Raises
    ------
    ScheduleSyntaxError
        Unknown statement, malformed pair, duplicate or missing key. Carries
        ``line`` and ``column`` (both 1-based).
    UnknownKey
        A key the statement does not accept.
    UnitError
        Missing, unknown or wrong-kind unit suffix.
    NegativeDuration
        ``dur`` not strictly positive.
    InvalidTiming
        A gate placed after the end of the schedule.
    """
    segments: list[Segment] = []
    gates: list[tuple[InstantGate, int, int]] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        tokens = list(_TOKEN.finditer(line))
        if not tokens:
            continue
        head = tokens[0]
        word, col = head.group(), head.start() + 1
        if word == "segment":
            v = _pairs(line, lineno, tokens[1:], _SEGMENT_KEYS)
            for req in ("dur", "delta0"):
                if req not in v:
                    raise ScheduleSyntaxError(f"segment needs {req}=", lineno, col)
            dur, dcol = v["dur"]
            if not dur > 0:
                raise NegativeDuration(f"segment duration must be positive, got {dur!r} s",
                                       lineno, dcol)
            if "omega" in v and v["omega"][0] < 0:
                raise ScheduleError("omega must be non-negative", lineno, v["omega"][1])
            d0 = v["delta0"][0]
            p0 = v.get("phase0", (0.0, 0))[0]
            segments.append(Segment(dur, d0, v.get("delta1", (d0, 0))[0],
                                    v.get("omega", (0.0, 0))[0], p0, v.get("phase1", (p0, 0))[0]))
        elif word == "gate":
            v = _pairs(line, lineno, tokens[1:], _GATE_KEYS)
            for req in ("at", "axis", "angle"):
                if req not in v:
                    raise ScheduleSyntaxError(f"gate needs {req}=", lineno, col)
            at, acol = v["at"]
            if at < 0:
                raise InvalidTiming(f"gate time must be non-negative, got {at!r} s", lineno, acol)
            gates.append((InstantGate(at, v["axis"][0], v["angle"][0]), lineno, acol))
        else:
            raise ScheduleSyntaxError(f"expected 'segment' or 'gate', got {word!r}", lineno, col)
    total = sum(s.duration for s in segments)
    for g, lineno, acol in gates:
        if g.time > total:
            raise InvalidTiming(f"gate at {g.time!r} s is after the schedule end {total!r} s",
                                lineno, acol)
    return Schedule(tuple(segments), tuple(g for g, _, _ in gates))


def _format_axis(azimuth: float) -> str:
    for name, value in _AXES.items():
        if azimuth == value:
            return name
    return format_quantity(azimuth, "angle")


def serialize_schedule(schedule: Schedule) -> str:
    """Text form of ``schedule``; `parse_schedule` inverts it bit-exactly."""
    lines = []
    for s in schedule.segments:
        lines.append(
            "segment"
            f" dur={format_quantity(s.duration, 'time')}"
            f" delta0={format_quantity(s.delta_start, 'frequency')}"
            f" delta1={format_quantity(s.delta_end, 'frequency')}"
            f" omega={format_quantity(s.omega, 'frequency')}"
            f" phase0={format_quantity(s.phase_start, 'angle')}"
            f" phase1={format_quantity(s.phase_end, 'angle')}")
    for g in schedule.gates:
        lines.append(f"gate at={format_quantity(g.time, 'time')} axis={_format_axis(g.axis)}"
                     f" angle={format_quantity(g.angle, 'angle')}")
    return "\n".join(lines) + "\n"


def iter_gate_times(schedule: Schedule) -> Iterable[float]:
    """Distinct gate times in increasing order."""
    seen = None
    for g in schedule.gates:
        if g.time != seen:
            seen = g.time
            yield g.time
