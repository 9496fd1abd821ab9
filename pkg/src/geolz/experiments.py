"""Protocol runners, plateau extraction, exponential fits and shot sampling.

Every runner builds one schedule per sweep point, evolves it and records
the final excited population. Points are independent. With ``workers > 1``
they are evaluated on a thread pool, and results are always returned in
sweep order.

Readout basis
-------------
The rotating-frame field is on at the start and end of the interferometry
cycles (detuning +delta0, drive Omega). The default ``readout="dressed"``
prepares the field eigenstate connected to |0> and reports the population
of the eigenstate connected to |1>. This is what an adiabatic switch-on
and switch-off of the drive would give. ``readout="bare"`` starts in |0>
and reports rho11 directly. The two differ by about (Omega/2 delta0)^2.
The T1 and T2 protocols have no drive at their ends, so the two coincide
there.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from . import analytic
from .dynamics import (DEFAULT_DT, DecoherenceParams, DensityMatrix, QubitState, Trajectory,
                       bloch_state, dressed_excited_axis, evolve_master, evolve_schrodinger,
                       projected_population)
from .errors import GeolzError, NoConvergence, PlateauNotFlat, SingularFit, SweepPointError
from .schedule import (Schedule, build_dlzi, build_glzi, build_t1, build_t2_echo,
                       sample_field)

TWO_PI = 2.0 * math.pi

#: Protocol defaults, in internal units.
DEFAULT_DELTA0 = TWO_PI * 100e6
DEFAULT_OMEGA = TWO_PI * 20e6
DEFAULT_TAU_P = 25e-9
DEFAULT_TAU_C = 100e-9
DEFAULT_T1 = 118e-9
DEFAULT_T2 = 157e-9

METHODS = ("schrodinger", "master", "impulse")
READOUTS = ("dressed", "bare")
_ONLY_ENDPOINTS = 1 << 62


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Populations over a 1-D sweep or a 2-D map.

    Attributes
    ----------
    axis_name : str
        Name of the fast axis, including its unit (e.g. ``"theta_rad"``).
    axis_values : ndarray, shape (n,)
    p1 : ndarray
        Shape (n,) or, for maps, (m, n) with rows indexed by the second axis.
    method : str
    params : dict
        Every parameter needed to rerun the sweep.
    second_axis_name : str, optional
    second_axis_values : ndarray, shape (m,), optional
    """

    axis_name: str
    axis_values: np.ndarray
    p1: np.ndarray
    method: str
    params: dict = field(default_factory=dict)
    second_axis_name: str | None = None
    second_axis_values: np.ndarray | None = None

    def __post_init__(self):
        ax = np.asarray(self.axis_values, dtype=float)
        p1 = np.asarray(self.p1, dtype=float)
        object.__setattr__(self, "axis_values", ax)
        object.__setattr__(self, "p1", p1)
        if self.second_axis_values is not None:
            ax2 = np.asarray(self.second_axis_values, dtype=float)
            object.__setattr__(self, "second_axis_values", ax2)
            if p1.shape != (ax2.size, ax.size):
                raise ValueError(f"p1 shape {p1.shape} does not match axes ({ax2.size}, {ax.size})")
        elif p1.shape != ax.shape:
            raise ValueError(f"p1 shape {p1.shape} does not match axis shape {ax.shape}")
        if p1.size and (p1.min() < -1e-9 or p1.max() > 1 + 1e-9):
            raise ValueError("populations outside [0, 1]")

    @property
    def contrast(self) -> float:
        """max - min of the populations (over the whole map for 2-D results)."""
        return analytic.contrast(self.p1.ravel())

    def __eq__(self, other):
        if not isinstance(other, SweepResult):
            return NotImplemented
        same_second = ((self.second_axis_values is None and other.second_axis_values is None)
                       or (self.second_axis_values is not None
                           and other.second_axis_values is not None
                           and np.array_equal(self.second_axis_values, other.second_axis_values)))
        return (self.axis_name == other.axis_name and self.method == other.method
                and self.params == other.params and self.second_axis_name == other.second_axis_name
                and np.array_equal(self.axis_values, other.axis_values)
                and np.array_equal(self.p1, other.p1) and same_second)


@dataclass(frozen=True)
class DecayFit:
    """Result of fitting ``A exp(-t/T) + B``."""

    amplitude: float
    time_constant: float
    offset: float
    residual_norm: float
    time_constant_stderr: float


@dataclass(frozen=True, eq=False)
class TimeTrace:
    """Population against time for one interferometry cycle.

    Attributes
    ----------
    trajectory : Trajectory
        Raw integrator output; ``trajectory.populations`` is the bare P1.
    populations : ndarray
        P1 in the requested readout basis at each sample.
    window : (float, float)
        Plateau window between the first crossing and the echo.
    plateau_p1, plateau_std : float
        Mean and standard deviation of ``populations`` inside the window.
    p_lz_prime : float
        Effective crossing transition probability, ``1 - plateau_p1``. The
        system starts in the state connected to |0>, and following the
        crossing adiabatically ends in the state connected to |1>, so the
        plateau population is the probability of *not* making the
        transition.
    """

    trajectory: Trajectory
    populations: np.ndarray
    window: tuple[float, float]
    plateau_p1: float
    plateau_std: float
    p_lz_prime: float


# --- helpers ---------------------------------------------------------------

def _check_method(method: str, dec: DecoherenceParams | None):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if method == "master" and dec is None:
        raise ValueError("method 'master' requires decoherence parameters")
    if method != "master" and dec is not None:
        raise ValueError("decoherence parameters are only used by method 'master'")


def _final_field_axis(schedule: Schedule) -> np.ndarray:
    if schedule.total_duration == 0:
        return np.array([0.0, 0.0, 1.0])
    return dressed_excited_axis(schedule.field_before(schedule.total_duration))


def _initial_state(schedule: Schedule, readout: str) -> QubitState:
    if readout == "bare" or schedule.total_duration == 0:
        return QubitState.ground()
    return bloch_state(-dressed_excited_axis(sample_field(schedule, 0.0)))


def evolve_final_p1(schedule: Schedule, method: str = "schrodinger",
                    dec: DecoherenceParams | None = None, dt: float = DEFAULT_DT,
                    readout: str = "dressed") -> float:
    """Final excited population of ``schedule`` by direct integration."""
    if readout not in READOUTS:
        raise ValueError(f"readout must be one of {READOUTS}, got {readout!r}")
    psi0 = _initial_state(schedule, readout)
    if method == "master":
        tr = evolve_master(schedule, DensityMatrix.from_state(psi0), dec, dt, _ONLY_ENDPOINTS)
    elif method == "schrodinger":
        tr = evolve_schrodinger(schedule, psi0, dt, _ONLY_ENDPOINTS)
    else:
        raise ValueError(f"cannot integrate with method {method!r}")
    if readout == "bare":
        return float(tr.populations[-1])
    return float(projected_population(tr.states[-1], _final_field_axis(schedule)))


def dynamical_phase(schedule: Schedule, t_a: float, t_b: float) -> float:
    """Integral of the level splitting |B(t)| over [t_a, t_b], in radians.

    Evaluated in closed form segment by segment (|B| is the square root
    of a quadratic in t on each linear ramp).
    """
    total = 0.0
    for seg, s0, s1 in zip(schedule.segments, schedule.boundaries[:-1],
                           schedule.boundaries[1:]):
        a, b = max(t_a, s0), min(t_b, s1)
        if b <= a:
            continue
        om = seg.omega
        slope = (seg.delta_end - seg.delta_start) / seg.duration
        xa = seg.delta_start + slope * (a - s0)
        xb = seg.delta_start + slope * (b - s0)
        if slope == 0.0:
            total += (b - a) * math.hypot(om, xa)
            continue

        def prim(x):
            r = math.hypot(x, om)
            return 0.5 * (x * r + (om * om * math.asinh(x / om) if om > 0 else 0.0))

        total += (prim(xb) - prim(xa)) / slope
    return total


def crossing_parameters(delta0: float, omega: float, tau_p: float) -> analytic.LzCrossingParams:
    """Gap and sweep rate of a +delta0 -> -delta0 ramp over ``tau_p``."""
    return analytic.LzCrossingParams.from_sweep(omega, delta0, -delta0, tau_p)


def _impulse_p1(schedule: Schedule, delta0, omega, tau_p, p_lz, echo: bool) -> float:
    cp = crossing_parameters(delta0, omega, tau_p)
    p = analytic.lz_probability(cp) if p_lz is None else p_lz
    phi_s = analytic.stokes_phase(cp.adiabaticity)
    a = schedule.annotations
    if echo:
        z1 = dynamical_phase(schedule, a["tau_1"], a["tau_s"])
        z2 = dynamical_phase(schedule, a["tau_s"], a["tau_2"])
    else:
        z1, z2 = dynamical_phase(schedule, a["tau_1"], a["tau_2"]), 0.0
    return analytic.adiabatic_impulse_p1(analytic.ImpulseModelInputs(
        p, a["theta"], z1, z2, phi_s, echo))


def _map_points(fn: Callable, points: Sequence, names: Sequence[str], workers: int) -> list:
    def guarded(pt):
        try:
            return fn(*pt)
        except GeolzError as exc:
            raise SweepPointError(dict(zip(names, pt)), exc) from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(guarded, points))
    return [guarded(pt) for pt in points]


def _dec_record(dec: DecoherenceParams | None) -> dict:
    return {} if dec is None else {"T1": dec.T1, "T2": dec.T2}


# --- interferometry runners ------------------------------------------------

def run_glzi_theta_sweep(thetas: Sequence[float], delta0: float = DEFAULT_DELTA0,
                         omega: float = DEFAULT_OMEGA, tau_p: float = DEFAULT_TAU_P,
                         tau_c: float = DEFAULT_TAU_C, method: str = "schrodinger",
                         dec: DecoherenceParams | None = None, *, dt: float = DEFAULT_DT,
                         readout: str = "dressed", p_lz: float | None = None,
                         workers: int = 1) -> SweepResult:
    """Final P1 of the echoed geometric cycle against the excursion azimuth theta.

    Parameters
    ----------
    thetas : sequence of float
        Azimuths in radians.
    delta0, omega : float
        Detuning amplitude and drive (rad/s).
    tau_p, tau_c : float
        Sweep time and cycle period (s).
    method : {"schrodinger", "master", "impulse"}
        ``"impulse"`` evaluates the transfer-matrix model with ``p_lz``
        (default: the asymptotic Landau-Zener probability).
    dec : DecoherenceParams
        Required for, and only for, ``method="master"``.
    dt : float
        Integrator step.
    readout : {"dressed", "bare"}
    workers : int
        Thread-pool size for the independent sweep points.
    """
    _check_method(method, dec)
    thetas = [float(t) for t in thetas]

    def point(theta):
        s = build_glzi(delta0, omega, theta, tau_p, tau_c)
        if method == "impulse":
            return _impulse_p1(s, delta0, omega, tau_p, p_lz, True)
        return evolve_final_p1(s, method, dec, dt, readout)

    p1 = _map_points(point, [(t,) for t in thetas], ("theta",), workers)
    params = {"protocol": "glzi", "delta0": delta0, "omega": omega, "tau_p": tau_p,
              "tau_c": tau_c, "dt": dt, "readout": readout, **_dec_record(dec)}
    if method == "impulse":
        params["p_lz"] = p_lz
    return SweepResult("theta_rad", thetas, p1, method, params)


def run_glzi_map(thetas: Sequence[float], tau_ps: Sequence[float],
                 delta0: float = DEFAULT_DELTA0, omega: float = DEFAULT_OMEGA,
                 tau_c: float = DEFAULT_TAU_C, method: str = "schrodinger",
                 dec: DecoherenceParams | None = None, *, dt: float = DEFAULT_DT,
                 readout: str = "dressed", p_lz: float | None = None,
                 workers: int = 1) -> SweepResult:
    """P1 over a (tau_p, theta) grid; row ``i`` is a theta sweep at ``tau_ps[i]``."""
    _check_method(method, dec)
    thetas = [float(t) for t in thetas]
    tau_ps = [float(t) for t in tau_ps]

    def point(tau_p, theta):
        s = build_glzi(delta0, omega, theta, tau_p, tau_c)
        if method == "impulse":
            return _impulse_p1(s, delta0, omega, tau_p, p_lz, True)
        return evolve_final_p1(s, method, dec, dt, readout)

    pts = [(tp, th) for tp in tau_ps for th in thetas]
    flat = _map_points(point, pts, ("tau_p", "theta"), workers)
    p1 = np.array(flat, dtype=float).reshape(len(tau_ps), len(thetas))
    params = {"protocol": "glzi-map", "delta0": delta0, "omega": omega, "tau_c": tau_c,
              "dt": dt, "readout": readout, **_dec_record(dec)}
    if method == "impulse":
        params["p_lz"] = p_lz
    return SweepResult("theta_rad", thetas, p1, method, params, "tau_p_s", tau_ps)


def run_dlzi_sweep(tau_cs: Sequence[float], theta_const: float = 0.0,
                   delta0: float = DEFAULT_DELTA0, omega: float = DEFAULT_OMEGA,
                   tau_p: float = DEFAULT_TAU_P, method: str = "schrodinger",
                   dec: DecoherenceParams | None = None, *, dt: float = DEFAULT_DT,
                   readout: str = "dressed", p_lz: float | None = None,
                   workers: int = 1) -> SweepResult:
    """Final P1 of the unechoed cycle at constant phase against the period tau_C."""
    _check_method(method, dec)
    tau_cs = [float(t) for t in tau_cs]

    def point(tau_c):
        s = build_dlzi(delta0, omega, theta_const, tau_p, tau_c)
        if method == "impulse":
            return _impulse_p1(s, delta0, omega, tau_p, p_lz, False)
        return evolve_final_p1(s, method, dec, dt, readout)

    p1 = _map_points(point, [(t,) for t in tau_cs], ("tau_c",), workers)
    params = {"protocol": "dlzi", "theta": float(theta_const), "delta0": delta0, "omega": omega,
              "tau_p": tau_p, "dt": dt, "readout": readout, **_dec_record(dec)}
    if method == "impulse":
        params["p_lz"] = p_lz
    return SweepResult("tau_c_s", tau_cs, p1, method, params)


def plateau_window(schedule: Schedule) -> tuple[float, float]:
    """``[tau_1 + 0.2 (tau_s - tau_1), tau_s - 0.2 (tau_s - tau_1)]``."""
    t1, ts = schedule.annotations["tau_1"], schedule.annotations["tau_s"]
    gap = ts - t1
    return t1 + 0.2 * gap, ts - 0.2 * gap


def run_time_trace(theta: float, delta0: float = DEFAULT_DELTA0, omega: float = DEFAULT_OMEGA,
                   tau_p: float = DEFAULT_TAU_P, tau_c: float = DEFAULT_TAU_C,
                   method: str = "schrodinger", dec: DecoherenceParams | None = None, *,
                   dt: float = DEFAULT_DT, sample_stride: int = 10, readout: str = "dressed",
                   flatness: float = 0.02) -> TimeTrace:
    """Sampled P1 through one geometric cycle and the post-crossing plateau.

    Raises
    ------
    PlateauNotFlat
        When the window standard deviation exceeds ``flatness``.
    """
    _check_method(method, dec)
    if method == "impulse":
        raise ValueError("a time trace needs an integrating method")
    s = build_glzi(delta0, omega, theta, tau_p, tau_c)
    psi0 = _initial_state(s, readout)
    if method == "master":
        tr = evolve_master(s, DensityMatrix.from_state(psi0), dec, dt, sample_stride)
    else:
        tr = evolve_schrodinger(s, psi0, dt, sample_stride)
    if readout == "bare":
        pops = tr.populations.copy()
    else:
        pops = np.empty(len(tr.times))
        for i, t in enumerate(tr.times):
            f = sample_field(s, t) if t < s.total_duration else s.field_before(t)
            pops[i] = projected_population(tr.states[i], dressed_excited_axis(f))
    lo, hi = plateau_window(s)
    inside = (tr.times >= lo) & (tr.times <= hi)
    mean = float(pops[inside].mean())
    std = float(pops[inside].std())
    if std > flatness:
        raise PlateauNotFlat(f"plateau standard deviation {std:.4g} exceeds {flatness}")
    return TimeTrace(tr, pops, (lo, hi), mean, std, 1.0 - mean)


# --- decoherence protocols -------------------------------------------------

def run_t1(delays: Sequence[float], dec: DecoherenceParams, dt: float = DEFAULT_DT,
           *, workers: int = 1) -> tuple[SweepResult, DecayFit]:
    """Pi pulse then free decay; P1 against delay and its exponential fit.

    Raises
    ------
    SingularFit, NoConvergence
        From `fit_exponential`, e.g. for infinite T1.
    """
    delays = [float(d) for d in delays]
    p1 = _map_points(lambda d: evolve_final_p1(build_t1(d), "master", dec, dt, "bare"),
                     [(d,) for d in delays], ("delay",), workers)
    res = SweepResult("delay_s", delays, p1, "master",
                      {"protocol": "t1", "dt": dt, **_dec_record(dec)})
    return res, fit_exponential(delays, p1)


def run_t2_echo(taus: Sequence[float], dec: DecoherenceParams, dt: float = DEFAULT_DT,
                *, workers: int = 1) -> tuple[SweepResult, DecayFit]:
    """Hahn echo; P1 against the total time 2 tau and its exponential fit."""
    taus = [float(t) for t in taus]
    p1 = _map_points(lambda t: evolve_final_p1(build_t2_echo(t), "master", dec, dt, "bare"),
                     [(t,) for t in taus], ("tau",), workers)
    totals = [2.0 * t for t in taus]
    res = SweepResult("total_time_s", totals, p1, "master",
                      {"protocol": "t2", "dt": dt, **_dec_record(dec)})
    return res, fit_exponential(totals, p1)


def fit_exponential(times: Sequence[float], values: Sequence[float],
                    max_iterations: int = 200) -> DecayFit:
    """Least-squares fit of ``A exp(-t/T) + B``.

    Starts from A = first - last, B = last, T = half the time span, and
    runs Levenberg-Marquardt (scipy) with a relative step tolerance of
    1e-10. Times are rescaled by the span internally.

    Raises
    ------
    ValueError
        Fewer than four points or non-increasing times.
    SingularFit
        Constant data, a rank-deficient Jacobian, or a non-decaying best fit.
    NoConvergence
        Iteration cap reached.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < 4 or t.size != y.size:
        raise ValueError("need at least four (time, value) pairs")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    scale_y = max(float(np.abs(y).max()), 1e-300)
    if np.ptp(y) <= 1e-12 * scale_y:
        raise SingularFit("data are constant; the time constant is undetermined")
    span = float(t[-1] - t[0])
    u = t / span

    def resid(q):
        return q[0] * np.exp(-u / q[1]) + q[2] - y

    def jac(q):
        e = np.exp(-u / q[1])
        return np.column_stack([e, q[0] * e * u / q[1] ** 2, np.ones_like(u)])

    q0 = np.array([y[0] - y[-1], 0.5, y[-1]])
    sol = least_squares(resid, q0, jac=jac, method="lm", xtol=1e-10, ftol=1e-15,
                        gtol=1e-15, max_nfev=max_iterations)
    if sol.status == 0:
        raise NoConvergence(f"no convergence within {max_iterations} evaluations")
    a, tau_u, b = sol.x
    if not (tau_u > 0 and np.isfinite(sol.x).all()):
        raise SingularFit("best fit does not decay")
    J = jac(sol.x)
    jtj = J.T @ J
    if np.linalg.cond(jtj) > 1e14:
        raise SingularFit("Jacobian is rank deficient")
    rss = float(sol.fun @ sol.fun)
    dof = t.size - 3
    stderr = math.sqrt(max(rss / dof * np.linalg.inv(jtj)[1, 1], 0.0)) * span if dof else 0.0
    return DecayFit(float(a), float(tau_u * span), float(b), math.sqrt(rss), stderr)


def simulate_shots(p1: Sequence[float], n_shots: int, seed: int | None = 0) -> np.ndarray:
    """Fraction of ``n_shots`` Bernoulli(P1) outcomes per point.

    The generator is ``numpy.random.default_rng(seed)``, so identical
    seeds give identical output.
    """
    p = np.asarray(p1, dtype=float)
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    if p.size and (p.min() < -1e-9 or p.max() > 1 + 1e-9):
        raise ValueError("populations must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    return rng.binomial(n_shots, np.clip(p, 0.0, 1.0)) / n_shots
