import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import loggamma as scipy_loggamma

from geolz.analytic import (ImpulseModelInputs, LzCrossingParams, adiabatic_impulse_p1, contrast,
                            crossing_matrix, glzi_population, lz_probability, stokes_phase)
from geolz.errors import EmptySeries
from geolz.special import loggamma

from oracles import TWO_PI, impulse_echo, impulse_no_echo, stokes_reference

probs = st.floats(0.0, 1.0)
angles = st.floats(-10.0, 10.0)


@pytest.mark.parametrize("z", [0.5, 1.0, 2.5 + 3j, 1 - 10j, 0.1 + 0.2j, 7.3 - 0.01j, 30 + 40j,
                               1 - 0.0785j, 0.01 - 5j])
def test_loggamma_against_mpmath(z):
    ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag) if isinstance(z, complex) else z))
    assert abs(loggamma(z) - ref) <= 5e-14 * max(1.0, abs(ref))


def test_loggamma_array_against_scipy():
    rng = np.random.default_rng(0)
    z = rng.uniform(0.05, 20, 500) + 1j * rng.uniform(-50, 50, 500)
    assert np.allclose(loggamma(z), scipy_loggamma(z), rtol=1e-13, atol=1e-13)


def test_loggamma_domain():
    with pytest.raises(ValueError):
        loggamma(-0.5 + 1j)


def test_lz_probability_examples():
    c = LzCrossingParams.from_sweep(TWO_PI * 20e6, TWO_PI * 100e6, -TWO_PI * 100e6, 25e-9)
    assert c.sweep_rate == pytest.approx(TWO_PI * 200e6 / 25e-9)
    assert lz_probability(c) == pytest.approx(math.exp(-2 * math.pi * c.adiabaticity), rel=1e-15)
    assert lz_probability(c) == pytest.approx(0.6105, abs=1e-4)
    assert lz_probability(LzCrossingParams(0.0, 1.0)) == 1.0
    with pytest.raises(ValueError):
        LzCrossingParams(1.0, 0.0)


def test_lz_probability_monotone_in_gap_and_rate():
    gaps = np.linspace(0, 5e8, 30)
    p = [lz_probability(LzCrossingParams(g, 1e16)) for g in gaps]
    assert np.all(np.diff(p) < 0)
    rates = np.geomspace(1e14, 1e18, 30)
    p = [lz_probability(LzCrossingParams(1e8, a)) for a in rates]
    assert np.all(np.diff(p) > 0)


def test_glzi_population_values():
    assert glzi_population(0.61, math.pi / 2) == pytest.approx(1 - 4 * 0.61 * 0.39)
    assert glzi_population(0.61, math.pi / 2) == pytest.approx(0.0484, abs=5e-5)
    assert glzi_population(0.5, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(glzi_population(0.3, np.array([0.0, math.pi])), 1.0)


@given(probs, angles)
def test_glzi_population_symmetries(p, theta):
    v = glzi_population(p, theta)
    assert 0.0 <= v <= 1.0 + 1e-15
    assert glzi_population(p, theta + math.pi) == pytest.approx(v, abs=1e-12)
    assert glzi_population(p, -theta) == pytest.approx(v, abs=1e-12)
    assert glzi_population(1 - p, theta) == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("d", [1e-3, 0.0785, 0.3, 1.0, 2.0, 5.0, 10.0])
def test_stokes_phase_against_product_formula(d):
    assert stokes_phase(d) == pytest.approx(stokes_reference(d), abs=1e-12)


def test_stokes_phase_limits():
    assert stokes_phase(0.0) == math.pi / 4
    assert stokes_phase(1e-9) == pytest.approx(math.pi / 4, abs=1e-7)
    for d in (10.0, 30.0, 100.0):
        assert stokes_phase(d) == pytest.approx(1 / (12 * d), rel=0.02)
    ds = np.linspace(1e-4, 20, 400)
    phases = np.array([stokes_phase(d) for d in ds])
    assert np.all(np.diff(phases) < 0) and np.all(phases > 0)
    with pytest.raises(ValueError):
        stokes_phase(-1.0)


@given(probs, angles)
def test_crossing_matrix_unitary(p, phi):
    m = crossing_matrix(p, phi)
    assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


@settings(max_examples=300)
@given(probs, angles, angles, angles)
def test_impulse_model_with_echo(p, theta, zeta, phi):
    got = adiabatic_impulse_p1(ImpulseModelInputs(p, theta, zeta, zeta, phi, echo=True))
    assert got == pytest.approx(impulse_echo(p, theta, zeta, zeta), abs=1e-12)
    assert got == pytest.approx(glzi_population(p, theta), abs=1e-12)


@settings(max_examples=300)
@given(probs, angles, angles, angles, angles)
def test_impulse_model_closed_forms(p, theta, z1, z2, phi):
    echo = adiabatic_impulse_p1(ImpulseModelInputs(p, theta, z1, z2, phi, echo=True))
    assert echo == pytest.approx(impulse_echo(p, theta, z1, z2), abs=1e-12)
    plain = adiabatic_impulse_p1(ImpulseModelInputs(p, theta, z1, z2, phi, echo=False))
    assert plain == pytest.approx(impulse_no_echo(p, z1, z2, phi), abs=1e-12)


def test_impulse_inputs_validated():
    with pytest.raises(ValueError):
        ImpulseModelInputs(1.5)


def test_contrast():
    assert contrast([0.2, 0.9, 0.5]) == pytest.approx(0.7)
    assert contrast([0.3]) == 0.0
    with pytest.raises(EmptySeries):
        contrast([])
