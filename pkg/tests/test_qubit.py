import math

import numpy as np
import pytest

from geolz.errors import (BiasPointError, NoRootInBracket, NotMonotonic, QubitModelError,
                          TargetOutOfRange)
from geolz.qubit import (DEFAULT_BIAS_INTERVAL, DEFAULT_PARAMS, OPERATING_POINTS,
                         PhaseQubitParams, calibrate_bias, level_spacing, potential_energy,
                         potential_slope, spectroscopy_curve, stationary_phase_points)

from oracles import circuit_energies, grid_minimum, well_minimum_brentq

TWO_PI = 2 * math.pi


def test_energies_follow_circuit_definitions():
    C, L, Ic = 0.7e-12, 0.8e-9, 2e-6
    ec, ej, el = circuit_energies(C, L, Ic)
    p = PhaseQubitParams.from_circuit(C, L, Ic)
    assert p.charging_energy == pytest.approx(ec, rel=1e-12)
    assert p.josephson_energy == pytest.approx(ej, rel=1e-12)
    assert p.inductance_energy == pytest.approx(el, rel=1e-12)


def test_inconsistent_raw_values_rejected():
    p = DEFAULT_PARAMS
    with pytest.raises(QubitModelError):
        PhaseQubitParams(p.charging_energy * (1 + 1e-9), p.josephson_energy,
                         p.inductance_energy, capacitance=p.capacitance)


def test_nonpositive_energy_rejected():
    with pytest.raises(QubitModelError):
        PhaseQubitParams(1.0, 0.0, 1.0)


def test_harmonic_limit_is_lc_frequency():
    # 2 sqrt(E_C E_L) must equal 1/sqrt(LC): a check on the whole unit chain
    C, L = 0.7e-12, 0.8e-9
    p = PhaseQubitParams.from_circuit(C, L, 2e-6)
    assert 2 * math.sqrt(p.charging_energy * p.inductance_energy) == pytest.approx(
        1 / math.sqrt(L * C), rel=1e-12)


def test_harmonic_limit_through_level_spacing():
    p = DEFAULT_PARAMS
    q = PhaseQubitParams(p.charging_energy, 1e-6 * p.inductance_energy, p.inductance_energy, 1.0)
    w = level_spacing(q)
    assert w == pytest.approx(2 * math.sqrt(q.charging_energy * q.inductance_energy), rel=1e-3)
    # no barrier exists, so the full well geometry is unavailable
    with pytest.raises(NoRootInBracket):
        stationary_phase_points(q)


def test_potential_examples():
    p = DEFAULT_PARAMS.with_flux(math.pi)
    assert potential_energy(math.pi, p) == pytest.approx(p.josephson_energy, rel=1e-15)
    rng = np.random.default_rng(1)
    x = rng.uniform(-math.pi, math.pi, 100)
    a, b = potential_energy(math.pi + x, p), potential_energy(math.pi - x, p)
    assert np.allclose(a, b, rtol=1e-12, atol=0)
    q = PhaseQubitParams(1.0, 1e-300, 3.0, 0.5)
    assert potential_energy(2.0, q) == pytest.approx(3.0 * 1.5 ** 2)


def test_symmetric_well_maximum_at_pi():
    g = stationary_phase_points(DEFAULT_PARAMS.with_flux(math.pi))
    assert g.phi_max == pytest.approx(math.pi, abs=1e-14)


@pytest.mark.parametrize("phi_ex", [3.0, 3.6, 4.1, 4.5, 5.5])
def test_minimum_matches_independent_root_and_grid(phi_ex):
    p = DEFAULT_PARAMS.with_flux(phi_ex)
    g = stationary_phase_points(p)
    pc = math.acos(-2 * p.inductance_energy / p.josephson_energy)
    ref = well_minimum_brentq(p.josephson_energy, p.inductance_energy, phi_ex, 0.0, pc)
    assert g.phi_min == pytest.approx(ref, abs=1e-12)
    gm, step = grid_minimum(p.josephson_energy, p.inductance_energy, phi_ex, 0.0, pc)
    assert abs(g.phi_min - gm) <= step
    assert abs(potential_slope(g.phi_min, p)) <= 1e-10 * p.josephson_energy
    assert abs(potential_slope(g.phi_max, p)) <= 1e-10 * p.josephson_energy
    assert g.phi_max > g.phi_min


def test_spacing_formula_consistency():
    p = DEFAULT_PARAMS.with_flux(3.8)
    g = stationary_phase_points(p)
    w = math.sqrt(2 * p.charging_energy * (p.josephson_energy * math.cos(g.phi_min)
                                           + 2 * p.inductance_energy))
    assert level_spacing(p) == pytest.approx(w, rel=1e-12)
    assert g.curvature_at_min == pytest.approx(w * w, rel=1e-12)


def test_no_minimum_raises():
    with pytest.raises(NoRootInBracket):
        stationary_phase_points(DEFAULT_PARAMS.with_flux(3.8), (2.0, 2.5))


@pytest.mark.parametrize("name", ["S", "M", "F"])
def test_calibration_hits_operating_points(name):
    phi = calibrate_bias(DEFAULT_PARAMS, OPERATING_POINTS[name])
    w = level_spacing(DEFAULT_PARAMS.with_flux(phi))
    assert abs(w - OPERATING_POINTS[name]) <= TWO_PI * 1e3


def test_spacing_monotonic_around_operating_point():
    phi = calibrate_bias(DEFAULT_PARAMS, OPERATING_POINTS["M"])
    grid = phi + np.linspace(-0.05, 0.05, 41)
    w = np.array([level_spacing(DEFAULT_PARAMS.with_flux(x)) for x in grid])
    assert np.all(np.diff(w) < 0)


def test_calibration_errors_and_endpoint():
    with pytest.raises(TargetOutOfRange):
        calibrate_bias(DEFAULT_PARAMS, TWO_PI * 1e12)
    lo = DEFAULT_BIAS_INTERVAL[0]
    w_lo = level_spacing(DEFAULT_PARAMS.with_flux(lo))
    assert calibrate_bias(DEFAULT_PARAMS, w_lo) == lo
    # past the critical flux the shallow well vanishes and the spacing jumps
    with pytest.raises(NotMonotonic):
        calibrate_bias(DEFAULT_PARAMS, TWO_PI * 12e9, (6.0, 7.0), bracket=(0.0, 4 * math.pi))


def test_spectroscopy_curve():
    b = calibrate_bias(DEFAULT_PARAMS, OPERATING_POINTS["S"])
    f = calibrate_bias(DEFAULT_PARAMS, OPERATING_POINTS["F"])
    curve = spectroscopy_curve(DEFAULT_PARAMS, [b, f])
    assert abs(curve[0][1] - TWO_PI * 14.4e9) <= TWO_PI * 1e3
    assert abs(curve[1][1] - TWO_PI * 14.2e9) <= TWO_PI * 1e3
    assert len(spectroscopy_curve(DEFAULT_PARAMS, [3.5])) == 1
    dense = spectroscopy_curve(DEFAULT_PARAMS, np.linspace(*DEFAULT_BIAS_INTERVAL, 101))
    assert np.all(np.diff([w for _, w in dense]) < 0)


def test_spectroscopy_reports_bias():
    with pytest.raises(BiasPointError) as ei:
        spectroscopy_curve(DEFAULT_PARAMS, [3.5, 7.5])
    assert ei.value.bias == 7.5
