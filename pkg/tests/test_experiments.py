import math

import numpy as np
import pytest

from geolz.analytic import glzi_population
from geolz.dynamics import DecoherenceParams
from geolz.errors import NoConvergence, SingularFit, SweepPointError
from geolz.experiments import (DEFAULT_DELTA0, DEFAULT_OMEGA, DEFAULT_TAU_P, SweepResult,
                               crossing_parameters, dynamical_phase, evolve_final_p1, fit_exponential,
                               run_dlzi_sweep, run_glzi_map, run_glzi_theta_sweep, run_t1,
                               run_t2_echo, run_time_trace, simulate_shots)
from geolz.schedule import Schedule, Segment, build_glzi, build_t2_echo

from oracles import echo_p1

DEC = DecoherenceParams(118e-9, 157e-9)
THETAS = np.linspace(0, math.pi, 9)


def test_fit_recovers_synthetic_decay():
    t = np.linspace(0, 500e-9, 40)
    y = 0.8 * np.exp(-t / 118e-9) + 0.1
    fit = fit_exponential(t, y)
    assert fit.time_constant == pytest.approx(118e-9, rel=1e-8)
    assert fit.amplitude == pytest.approx(0.8, rel=1e-8)
    assert fit.offset == pytest.approx(0.1, abs=1e-9)
    assert fit.residual_norm < 1e-9


def test_fit_with_noise_reports_sensible_error():
    rng = np.random.default_rng(1)
    t = np.linspace(0, 400e-9, 60)
    y = np.exp(-t / 100e-9) + rng.normal(0, 0.01, t.size)
    fit = fit_exponential(t, y)
    assert abs(fit.time_constant - 100e-9) < 4 * fit.time_constant_stderr
    assert 0 < fit.time_constant_stderr < 5e-9


def test_fit_failures():
    t = np.linspace(0, 1e-7, 10)
    with pytest.raises(SingularFit):
        fit_exponential(t, np.full(10, 0.3))
    with pytest.raises(NoConvergence):
        fit_exponential(t, np.exp(-t / 3e-8) + 0.01 * np.sin(t * 1e8), max_iterations=1)
    with pytest.raises(ValueError):
        fit_exponential(t[:3], t[:3])
    with pytest.raises(ValueError):
        fit_exponential(t[::-1], t)


def test_shots_are_seeded():
    p = np.linspace(0, 1, 11)
    a = simulate_shots(p, 1000, seed=7)
    assert np.array_equal(a, simulate_shots(p, 1000, seed=7))
    assert not np.array_equal(a, simulate_shots(p, 1000, seed=8))
    assert a[0] == 0.0 and a[-1] == 1.0
    with pytest.raises(ValueError):
        simulate_shots(p, 0)


def test_shot_noise_averages_out():
    p = np.array([0.1, 0.37, 0.5, 0.92])
    means = np.mean([simulate_shots(p, 2000, seed=s) for s in range(100)], axis=0)
    assert np.max(np.abs(means - p)) < 0.01


def test_theta_sweep_shape_and_determinism():
    r = run_glzi_theta_sweep(THETAS[:4])
    assert r.axis_name == "theta_rad" and r.p1.shape == (4,)
    assert r == run_glzi_theta_sweep(THETAS[:4])
    assert r == run_glzi_theta_sweep(THETAS[:4], workers=3)
    assert r.params["tau_c"] == 100e-9 and r.method == "schrodinger"


def test_map_rows_match_single_sweeps():
    tps = [20e-9, 30e-9]
    m = run_glzi_map(THETAS[:3], tps)
    assert m.p1.shape == (2, 3) and m.second_axis_name == "tau_p_s"
    for i, tp in enumerate(tps):
        assert np.array_equal(m.p1[i], run_glzi_theta_sweep(THETAS[:3], tau_p=tp).p1)


def test_method_and_decoherence_pairing():
    with pytest.raises(ValueError):
        run_glzi_theta_sweep([0.0], method="master")
    with pytest.raises(ValueError):
        run_glzi_theta_sweep([0.0], dec=DEC)
    with pytest.raises(ValueError):
        run_glzi_theta_sweep([0.0], method="magic")


def test_failing_point_is_named():
    with pytest.raises(SweepPointError) as ei:
        run_glzi_theta_sweep([0.0, 1.0], tau_c=40e-9)
    assert ei.value.point == {"theta": 0.0}


def test_impulse_sweep_matches_closed_form():
    r = run_glzi_theta_sweep(THETAS, method="impulse", p_lz=0.61)
    assert np.allclose(r.p1, glzi_population(0.61, THETAS), atol=1e-12)
    p = math.exp(-2 * math.pi * crossing_parameters(DEFAULT_DELTA0, DEFAULT_OMEGA,
                                                    DEFAULT_TAU_P).adiabaticity)
    r = run_glzi_theta_sweep(THETAS, method="impulse")
    assert np.allclose(r.p1, glzi_population(p, THETAS), atol=1e-12)


def test_impulse_dlzi_reaches_full_swing_at_half():
    taus = np.linspace(60e-9, 160e-9, 201)
    r = run_dlzi_sweep(taus, method="impulse", p_lz=0.5)
    assert r.p1.max() <= 1.0 + 1e-12
    assert r.contrast > 0.97


def test_impulse_dlzi_tracks_direct_integration():
    taus = np.linspace(60e-9, 160e-9, 21)
    direct = run_dlzi_sweep(taus, workers=4).p1
    model = run_dlzi_sweep(taus, method="impulse").p1
    assert np.max(np.abs(direct - model)) < 0.03


def test_decoherence_reduces_contrast():
    clean = run_glzi_theta_sweep(THETAS).contrast
    mild = run_glzi_theta_sweep(THETAS, method="master", dec=DecoherenceParams(2e-6, 2e-6)).contrast
    strong = run_glzi_theta_sweep(THETAS, method="master", dec=DEC).contrast
    assert clean > mild > strong > 0.1


def test_dynamical_phase_closed_form():
    s = Schedule((Segment(10e-9, 3e8, omega=4e8),))
    assert dynamical_phase(s, 0, 10e-9) == pytest.approx(5e8 * 10e-9, rel=1e-14)
    s = build_glzi(DEFAULT_DELTA0, DEFAULT_OMEGA, 0.4, 25e-9, 100e-9)
    grid = np.linspace(0, 100e-9, 400_001)
    from geolz.schedule import sample_field
    mags = np.array([math.hypot(*sample_field(s, t)[:2], sample_field(s, t).delta)
                     for t in grid[:-1]] + [DEFAULT_DELTA0 * math.hypot(1, 0.2)])
    ref = np.trapezoid(mags, grid) if hasattr(np, "trapezoid") else np.trapz(mags, grid)
    assert dynamical_phase(s, 0, 100e-9) == pytest.approx(ref, rel=1e-6)


def test_t1_protocol():
    delays = np.linspace(0, 400e-9, 9)
    res, fit = run_t1(delays, DEC)
    assert res.p1[0] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(res.p1, np.exp(-delays / 118e-9), atol=1e-6)
    assert fit.time_constant == pytest.approx(118e-9, rel=0.02)
    with pytest.raises(SingularFit):
        run_t1(delays, DecoherenceParams())


def test_t2_echo_protocol():
    taus = np.linspace(0, 200e-9, 9)
    res, fit = run_t2_echo(taus, DEC)
    assert res.axis_name == "total_time_s"
    assert res.p1[0] == pytest.approx(0.0, abs=1e-12)
    ref = [echo_p1(2 * t, 157e-9) for t in taus]
    assert np.allclose(res.p1, ref, atol=1e-6)
    assert fit.time_constant == pytest.approx(157e-9, rel=0.02)


def test_t2_echo_fast_dephasing_limit():
    dec = DecoherenceParams(1e-3, 1e-9)
    p1 = evolve_final_p1(build_t2_echo(50e-9), "master", dec, readout="bare")
    assert p1 == pytest.approx(0.5, abs=1e-6)
    # a step with no resolvable decay cannot pin down the time constant
    with pytest.raises(SingularFit):
        run_t2_echo(np.linspace(0, 100e-9, 5), dec)


def test_time_trace_records_readouts():
    tr = run_time_trace(math.pi / 2, flatness=math.inf)
    assert tr.populations.shape == tr.trajectory.times.shape
    assert tr.populations[0] == pytest.approx(0.0, abs=1e-12)
    lo, hi = tr.window
    assert lo < hi and tr.p_lz_prime == pytest.approx(1 - tr.plateau_p1)
    bare = run_time_trace(math.pi / 2, readout="bare", flatness=math.inf)
    assert np.array_equal(bare.populations, bare.trajectory.populations)


def test_sweep_result_validation():
    with pytest.raises(ValueError):
        SweepResult("x", [1.0, 2.0], [0.5], "impulse")
    with pytest.raises(ValueError):
        SweepResult("x", [1.0], [1.5], "impulse")
