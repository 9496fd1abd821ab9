"""Two-level dynamics in the rotating frame.

Conventions
-----------
Amplitudes are stored in the order (|0>, |1>). The Pauli matrices are the
standard ones with |1> playing the role of spin up, written in that storage
order::

    sigma_x = [[0, 1], [1, 0]]
    sigma_y = [[0, 1j], [-1j, 0]]
    sigma_z = [[-1, 0], [0, 1]]

so that H = (delta sigma_z + Omega_x sigma_x + Omega_y sigma_y) / 2 puts
+delta/2 on the excited state and has ``H[1, 0] = (Omega_x - i Omega_y)/2``.
The Bloch vector is ``r_i = Tr(rho sigma_i)``.

Master equation
---------------
With Gamma_1 = 1/T1 and gamma = 1/T2 the density matrix obeys

    d rho11/dt = -i (H10 rho01 - H01 rho10) - Gamma_1 rho11
    d rho10/dt = -i [delta rho10 + H10 (rho00 - rho11)] - gamma rho10
    d rho00/dt = -d rho11/dt,       rho01 = conj(rho10)

The coherence equation carries ``delta * rho10``. A factor of one half on
that term, as sometimes printed, would not reduce to the Schrodinger
equation when Gamma_1 = gamma = 0; the full factor is what the test-suite
checks against the pure-state solver.

Integration
-----------
Classical fourth-order Runge-Kutta with a fixed step, never straddling a
segment boundary or a gate. Because the generator is linear, each step is
a fixed matrix built in bulk with numpy, and the steps between two
recorded samples are multiplied together by pairwise reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import NormDrift, PositivityLoss, StepTooLarge
from .field import EffectiveField
from .schedule import Schedule

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

DEFAULT_DT = 1e-12
DEFAULT_STRIDE = 100
_CHUNK = 1 << 14  # steps per batched block, bounds memory


@dataclass(frozen=True)
class QubitState:
    """Normalized pure state ``amplitude_g |0> + amplitude_e |1>``."""

    amplitude_g: complex
    amplitude_e: complex

    def __post_init__(self):
        g, e = complex(self.amplitude_g), complex(self.amplitude_e)
        object.__setattr__(self, "amplitude_g", g)
        object.__setattr__(self, "amplitude_e", e)
        n = abs(g) ** 2 + abs(e) ** 2
        if not abs(n - 1.0) <= 1e-9:
            raise ValueError(f"state norm^2 is {n!r}, expected 1")

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(1.0, 0.0)

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(0.0, 1.0)

    @classmethod
    def from_vector(cls, v) -> "QubitState":
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amplitude_g, self.amplitude_e], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix given by its four components."""

    rho00: float
    rho11: float
    rho01: complex
    rho10: complex

    def __post_init__(self):
        for name in ("rho00", "rho11"):
            v = complex(getattr(self, name))
            if abs(v.imag) > 1e-10:
                raise ValueError(f"{name} must be real, got {v!r}")
            object.__setattr__(self, name, v.real)
        object.__setattr__(self, "rho01", complex(self.rho01))
        object.__setattr__(self, "rho10", complex(self.rho10))
        if abs(self.rho00 + self.rho11 - 1.0) > 1e-8:
            raise ValueError("density matrix trace differs from 1")
        if abs(self.rho01 - self.rho10.conjugate()) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(self.matrix).min() < -1e-8:
            raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def from_state(cls, state: QubitState) -> "DensityMatrix":
        return cls.from_matrix(np.outer(state.vector, state.vector.conj()))

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1], m[1, 0])

    @classmethod
    def ground(cls) -> "DensityMatrix":
        return cls(1.0, 0.0, 0.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)


QuantumState = Union[QubitState, DensityMatrix]


@dataclass(frozen=True)
class DecoherenceParams:
    """Relaxation time T1 and coherence time T2, in seconds.

    ``math.inf`` switches the corresponding process off. Requires
    ``T2 <= 2 T1``.
    """

    T1: float = math.inf
    T2: float = math.inf

    def __post_init__(self):
        t1, t2 = float(self.T1), float(self.T2)
        if not (t1 > 0 and t2 > 0) or math.isnan(t1) or math.isnan(t2):
            raise ValueError("T1 and T2 must be positive")
        if t2 > 2.0 * t1:
            raise ValueError(f"T2={t2!r} exceeds 2*T1={2 * t1!r}")
        object.__setattr__(self, "T1", t1)
        object.__setattr__(self, "T2", t2)

    @property
    def gamma1(self) -> float:
        """Gamma_1 = 1/T1 (0 for infinite T1)."""
        return 0.0 if math.isinf(self.T1) else 1.0 / self.T1

    @property
    def gamma(self) -> float:
        """gamma = 1/T2 (0 for infinite T2)."""
        return 0.0 if math.isinf(self.T2) else 1.0 / self.T2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution.

    Attributes
    ----------
    times : ndarray, shape (m,)
        Strictly increasing sample times in seconds.
    states : ndarray
        Shape (m, 2) state vectors or (m, 2, 2) density matrices.
    populations : ndarray, shape (m,)
        Excited-state population P1 at each sample.
    kind : {"pure", "mixed"}
    """

    times: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    kind: str

    def state(self, i: int = -1) -> QuantumState:
        """Sample ``i`` as a `QubitState` or `DensityMatrix`."""
        s = self.states[i]
        if self.kind == "pure":
            return QubitState.from_vector(s / np.linalg.norm(s))
        return DensityMatrix.from_matrix(0.5 * (s + s.conj().T))

    @property
    def final_population(self) -> float:
        return float(self.populations[-1])


class Levels(NamedTuple):
    """Instantaneous eigen-decomposition of H; ``degenerate`` flags |B| ~ 0."""

    energy_g: float
    energy_e: float
    eigvec_g: np.ndarray
    eigvec_e: np.ndarray
    degenerate: bool


def hamiltonian_of(field: EffectiveField) -> np.ndarray:
    """H = (delta sigma_z + Omega_x sigma_x + Omega_y sigma_y)/2 as a 2x2 matrix."""
    ox, oy, d = field
    return 0.5 * (d * SIGMA_Z + ox * SIGMA_X + oy * SIGMA_Y)


def _hamiltonians(ox, oy, d) -> np.ndarray:
    n = np.shape(d)
    h = np.empty(n + (2, 2), dtype=complex)
    h[..., 0, 0] = -0.5 * d
    h[..., 1, 1] = 0.5 * d
    h[..., 0, 1] = 0.5 * (ox + 1j * oy)
    h[..., 1, 0] = 0.5 * (ox - 1j * oy)
    return h


def _state_vector(v: np.ndarray) -> np.ndarray:
    """Eigenvector phase convention: largest component real and positive."""
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def instantaneous_levels(field: EffectiveField, scale: float = 1.0) -> Levels:
    """Eigenvalues -|B|/2, +|B|/2 and eigenvectors of H.

    Parameters
    ----------
    field : EffectiveField
    scale : float
        Reference field scale (rad/s). The result is flagged degenerate
        when ``|B| < 1e-6 * max(scale, largest |component|)``; for an exactly
        zero field the eigenvectors default to |0>, |1>.
    """
    b = field.magnitude
    ref = max(scale, abs(field.omega_x), abs(field.omega_y), abs(field.delta))
    degenerate = b < 1e-6 * ref or b == 0.0
    if b == 0.0:
        return Levels(0.0, 0.0, np.array([1, 0], complex), np.array([0, 1], complex), True)
    w, v = np.linalg.eigh(hamiltonian_of(field))
    g = _state_vector(v[:, 0])
    e = _state_vector(v[:, 1])
    return Levels(-0.5 * b, 0.5 * b, g, e, degenerate)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """exp(-i angle sigma_axis / 2) for an in-plane axis ('x', 'y' or azimuth)."""
    if isinstance(axis, str):
        axis = {"x": 0.0, "y": 0.5 * math.pi}[axis]
    s = math.cos(axis) * SIGMA_X + math.sin(axis) * SIGMA_Y
    return math.cos(0.5 * angle) * _I2 - 1j * math.sin(0.5 * angle) * s


def apply_instant_rotation(state: QuantumState, axis, angle: float) -> QuantumState:
    """Rotate a pure state (U psi) or a density matrix (U rho U^dagger)."""
    u = rotation_matrix(axis, angle)
    if isinstance(state, QubitState):
        return QubitState.from_vector(u @ state.vector)
    m = u @ state.matrix @ u.conj().T
    return DensityMatrix.from_matrix(0.5 * (m + m.conj().T))


def excited_population(state: QuantumState) -> float:
    """|amplitude_e|^2 for a pure state, rho11 for a density matrix."""
    if isinstance(state, QubitState):
        return abs(state.amplitude_e) ** 2
    return float(state.rho11)


def bloch_vector(state) -> np.ndarray:
    """Bloch vector(s) ``Tr(rho sigma_i)``.

    Accepts a `QubitState`, `DensityMatrix`, or raw arrays of shape
    (..., 2) state vectors or (..., 2, 2) density matrices.
    """
    if isinstance(state, QubitState):
        state = state.vector
    elif isinstance(state, DensityMatrix):
        state = state.matrix
    a = np.asarray(state, dtype=complex)
    if a.shape[-1] == 2 and (a.ndim == 1 or a.shape[-2:] != (2, 2)):
        a = a[..., :, None] * a[..., None, :].conj()
    return np.stack([np.einsum("...ij,ji->...", a, s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)],
                    axis=-1)


def dressed_excited_axis(field: EffectiveField) -> np.ndarray:
    """Bloch direction of the field eigenstate that connects to |1>.

    This is the eigenstate whose population of |1> exceeds one half: the
    upper level for positive detuning and the lower level for negative
    detuning. Without transverse drive it is |1> itself. At exactly zero
    detuning the upper level is chosen.
    """
    ox, oy, d = field
    if ox == 0.0 and oy == 0.0:
        return np.array([0.0, 0.0, 1.0])
    b = np.array([ox, oy, d], dtype=float)
    b /= np.linalg.norm(b)
    return -b if d < 0 else b


def projected_population(state, axis) -> np.ndarray | float:
    """Population of the pure state with Bloch direction ``axis``: (1 + r.n)/2."""
    r = bloch_vector(state)
    p = 0.5 * (1.0 + r @ np.asarray(axis, dtype=float))
    return float(p) if np.ndim(p) == 0 else p


def bloch_state(axis) -> QubitState:
    """Pure state whose Bloch vector is the unit vector ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    w, v = np.linalg.eigh(n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z)
    return QubitState.from_vector(_state_vector(v[:, 1]))


# --- generators ------------------------------------------------------------

def schrodinger_generator(ox, oy, d) -> np.ndarray:
    """-iH for arrays of field components; shape (..., 2, 2)."""
    return -1j * _hamiltonians(ox, oy, d)


def master_generator(ox, oy, d, dec: DecoherenceParams) -> np.ndarray:
    """Linear generator L with d vec(rho)/dt = L vec(rho).

    ``vec(rho) = (rho00, rho01, rho10, rho11)``; built term by term from the
    component equations in the module docstring.
    """
    d = np.asarray(d, dtype=float)
    h01 = 0.5 * (np.asarray(ox) + 1j * np.asarray(oy))
    h10 = np.conj(h01)
    g1, g2 = dec.gamma1, dec.gamma
    L = np.zeros(d.shape + (4, 4), dtype=complex)
    L[..., 0, 1] = 1j * h10
    L[..., 0, 2] = -1j * h01
    L[..., 0, 3] = g1
    L[..., 1, 0] = 1j * h01
    L[..., 1, 1] = 1j * d - g2
    L[..., 1, 3] = -1j * h01
    L[..., 2, 0] = -1j * h10
    L[..., 2, 2] = -1j * d - g2
    L[..., 2, 3] = 1j * h10
    L[..., 3, 1] = -1j * h10
    L[..., 3, 2] = 1j * h01
    L[..., 3, 3] = -g1
    return L


def _rk4_step_matrices(nodes: np.ndarray, h: float) -> np.ndarray:
    """Exact RK4 update matrices for a linear ODE.

    ``nodes`` holds the generator at t_0, t_0 + h/2, t_0 + h, ..., t_0 + n h
    (2n + 1 entries); returns the n step matrices.
    """
    a0, ah, a1 = nodes[0:-1:2], nodes[1::2], nodes[2::2]
    eye = np.eye(nodes.shape[-1], dtype=complex)
    k2 = ah @ (eye + 0.5 * h * a0)
    k3 = ah @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return eye + (h / 6.0) * (a0 + 2.0 * k2 + 2.0 * k3 + k4)


def _chain(m: np.ndarray) -> np.ndarray:
    """Ordered product m[..., s-1] @ ... @ m[..., 0] by pairwise reduction."""
    while m.shape[-3] > 1:
        s = m.shape[-3]
        even = s - (s % 2)
        p = m[..., 1:even:2, :, :] @ m[..., 0:even:2, :, :]
        m = np.concatenate([p, m[..., even:, :, :]], axis=-3) if s % 2 else p
    return m[..., 0, :, :]


def _propagate(schedule: Schedule, v0: np.ndarray, generator, gate, dt: float, stride: int,
               observe, check):
    """Shared fixed-step driver.

    Parameters
    ----------
    generator : callable (ox, oy, d) -> (..., n, n)
    gate : callable (vector, InstantGate) -> vector
    observe : callable (vector) -> float, the recorded population
    check : callable (vector, t) -> None, raises on invariant violation
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if stride < 1:
        raise ValueError("sample_stride must be >= 1")
    segs = schedule.segments
    if segs:
        shortest = min(s.duration for s in segs)
        if dt > shortest:
            raise StepTooLarge(f"dt={dt!r} s exceeds the shortest segment ({shortest!r} s)")
    total = schedule.total_duration
    bounds = schedule.boundaries
    snap = 1e-12 * max(total, dt)
    gates = list(schedule.gates)
    gi = 0

    times: list[float] = []
    samples: list[np.ndarray] = []

    def record(t, v):
        check(v, t)
        if times and t <= times[-1]:
            times[-1] = t
            samples[-1] = v.copy()
        else:
            times.append(t)
            samples.append(v.copy())

    v = np.array(v0, dtype=complex)
    while gi < len(gates) and gates[gi].time <= snap:
        v = gate(v, gates[gi])
        gi += 1
    record(0.0, v)
    steps_done = 0

    for k, seg in enumerate(segs):
        t0, t1 = bounds[k], bounds[k + 1]
        cuts = [t0]
        j = gi
        while j < len(gates) and gates[j].time < t1 - snap:
            if gates[j].time > t0 + snap:
                cuts.append(gates[j].time)
            j += 1
        cuts.append(t1)
        for a, b in zip(cuts[:-1], cuts[1:]):
            while gi < len(gates) and gates[gi].time <= a + snap:
                v = gate(v, gates[gi])
                gi += 1
            span = b - a
            n = max(1, math.ceil(span / dt - 1e-9))
            h = span / n
            done = 0
            while done < n:
                m = min(_CHUNK, n - done)
                tau = (a - t0) + (done + 0.5 * np.arange(2 * m + 1)) * h
                steps = _rk4_step_matrices(generator(*seg.field_at(tau)), h)
                first = (-steps_done) % stride or stride
                pos = 0
                for size in _group_sizes(m, first, stride):
                    block = steps[pos:pos + size]
                    pos += size
                    v = _chain(block[None])[0] @ v
                    steps_done += size
                    if steps_done % stride == 0:
                        i = done + pos
                        record(b if i == n else a + i * h, v)
                done += m
    while gi < len(gates):
        v = gate(v, gates[gi])
        gi += 1
    record(total, v)
    states = np.array(samples)
    return np.array(times), states, np.array([observe(s) for s in states])


def _group_sizes(m: int, first: int, stride: int):
    if first >= m:
        yield m
        return
    yield first
    rest = m - first
    while rest >= stride:
        yield stride
        rest -= stride
    if rest:
        yield rest


def evolve_schrodinger(schedule: Schedule, initial: QubitState = None, dt: float = DEFAULT_DT,
                       sample_stride: int = DEFAULT_STRIDE) -> Trajectory:
    """Integrate i d psi/dt = H(t) psi through ``schedule``.

    Parameters
    ----------
    schedule : Schedule
    initial : QubitState, default |0>
    dt : float
        Target step in seconds; each segment piece uses the largest step
        not exceeding ``dt`` that tiles it exactly.
    sample_stride : int
        Record every ``sample_stride`` steps; t = 0 (after any gates at 0)
        and the end time (after any final gates) are always recorded.

    Raises
    ------
    StepTooLarge
        If ``dt`` exceeds the shortest segment.
    NormDrift
        If a recorded state's norm departs from 1 by more than 1e-6.
    """
    if initial is None:
        initial = QubitState.ground()

    def gate(v, g):
        return rotation_matrix(g.axis, g.angle) @ v

    def check(v, t):
        dev = abs(np.linalg.norm(v) - 1.0)
        if dev > 1e-6:
            raise NormDrift(f"norm deviates by {dev:.3g} at t={t!r} s")

    t, s, p = _propagate(schedule, initial.vector, schrodinger_generator, gate, dt,
                         sample_stride, lambda v: float(abs(v[1]) ** 2), check)
    return Trajectory(t, s, p, "pure")


def evolve_master(schedule: Schedule, initial: DensityMatrix = None,
                  dec: DecoherenceParams = DecoherenceParams(), dt: float = DEFAULT_DT,
                  sample_stride: int = DEFAULT_STRIDE) -> Trajectory:
    """Integrate the T1/T2 master equation through ``schedule``.

    Gates act by unitary conjugation. Arguments mirror `evolve_schrodinger`.

    Raises
    ------
    StepTooLarge
    PositivityLoss
        If a recorded density matrix has an eigenvalue below -1e-6.
    """
    if initial is None:
        initial = DensityMatrix.ground()

    def generator(ox, oy, d):
        return master_generator(ox, oy, d, dec)

    def gate(v, g):
        u = rotation_matrix(g.axis, g.angle)
        return (u @ v.reshape(2, 2) @ u.conj().T).reshape(4)

    def check(v, t):
        lo = np.linalg.eigvalsh(0.5 * (v.reshape(2, 2) + v.reshape(2, 2).conj().T)).min()
        if lo < -1e-6:
            raise PositivityLoss(f"eigenvalue {lo:.3g} at t={t!r} s")

    t, s, p = _propagate(schedule, initial.matrix.reshape(4), generator, gate, dt, sample_stride,
                         lambda v: float(v[3].real), check)
    return Trajectory(t, s.reshape(-1, 2, 2), p, "mixed")
