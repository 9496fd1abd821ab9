"""Simulator for geometric Landau-Zener interferometry in a driven qubit."""

__version__ = "0.1.0"

from .analytic import (ImpulseModelInputs, LzCrossingParams, adiabatic_impulse_p1, contrast,
                       crossing_matrix, glzi_population, lz_probability, stokes_phase)
from .dynamics import (DecoherenceParams, DensityMatrix, QubitState, Trajectory,
                       apply_instant_rotation, evolve_master, evolve_schrodinger,
                       excited_population, hamiltonian_of, instantaneous_levels)
from .experiments import (DecayFit, SweepResult, TimeTrace, fit_exponential, run_dlzi_sweep,
                          run_glzi_map, run_glzi_theta_sweep, run_t1, run_t2_echo,
                          run_time_trace, simulate_shots)
from .field import EffectiveField
from .qubit import (PhaseQubitParams, WellGeometry, calibrate_bias, level_spacing,
                    potential_energy, spectroscopy_curve, stationary_phase_points)
from .schedule import (InstantGate, Schedule, Segment, build_dlzi, build_glzi, build_t1,
                       build_t2_echo, parse_schedule, sample_field, serialize_schedule)
from .units import parse_quantity

__all__ = [name for name in dir() if not name.startswith("_")]
