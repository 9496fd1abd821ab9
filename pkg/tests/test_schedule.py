import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geolz.errors import (InvalidTiming, NegativeDuration, OutOfRange, ScheduleSyntaxError,
                          UnitError, UnknownKey)
from geolz.schedule import (InstantGate, Schedule, Segment, build_dlzi, build_glzi, build_t1,
                            build_t2_echo, parse_schedule, sample_field, serialize_schedule)

TWO_PI = 2 * math.pi
D0, OM, TP, TC = TWO_PI * 100e6, TWO_PI * 20e6, 25e-9, 100e-9
CORPUS = sorted((Path(__file__).parent / "data" / "schedules").glob("*.sched"))

# (text, error type, line, column): locations counted by hand, 1-based
MALFORMED = [
    ("segment dur=-5ns delta0=1MHz", NegativeDuration, 1, 13),
    ("segment dur=5 delta0=1MHz", UnitError, 1, 14),
    ("segment dur=5ns delta0=1MHz foo=3ns", UnknownKey, 1, 29),
    ("# ok\n  pulse dur=5ns", ScheduleSyntaxError, 2, 3),
    ("segment dur=5ns delta0=1MHz\nsegment dur=5ns delta0", ScheduleSyntaxError, 2, 17),
    ("segment dur=5ns delta0=1MHz dur=6ns", ScheduleSyntaxError, 1, 29),
    ("segment dur=5ns delta0=1Hz", UnitError, 1, 25),
    ("segment dur=5ns delta0=10ns", UnitError, 1, 26),
    ("\n\ngate at=1ns axis=z angle=1pi", UnitError, 3, 18),
    ("segment dur=5ns\n", ScheduleSyntaxError, 1, 1),
]


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 20


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    s1 = parse_schedule(path.read_text())
    text = serialize_schedule(s1)
    s2 = parse_schedule(text)
    assert s2 == s1
    assert serialize_schedule(s2) == text


@pytest.mark.parametrize("text, err, line, col", MALFORMED)
def test_malformed_locations(text, err, line, col):
    with pytest.raises(err) as ei:
        parse_schedule(text)
    assert (ei.value.line, ei.value.column) == (line, col)


def test_parse_examples():
    s = parse_schedule((Path(__file__).parent / "data" / "schedules" /
                        "02_two_segments_gate.sched").read_text())
    assert len(s.segments) == 2 and len(s.gates) == 1
    g = parse_schedule("segment dur=60ns delta0=0MHz\ngate at=50ns axis=x angle=1.0pi").gates[0]
    assert g == InstantGate(5e-8, "x", math.pi)
    seg = parse_schedule("segment dur=5ns delta0=3MHz").segments[0]
    assert seg == Segment(5e-9, TWO_PI * 3e6, TWO_PI * 3e6, 0.0, 0.0, 0.0)


def test_gate_after_end_rejected():
    with pytest.raises(InvalidTiming) as ei:
        parse_schedule("segment dur=5ns delta0=0MHz\ngate at=6ns axis=x angle=1pi")
    assert ei.value.line == 2


segments_st = st.builds(
    Segment,
    st.floats(1e-12, 1e-6),
    st.floats(-1e10, 1e10), st.floats(-1e10, 1e10), st.floats(0, 1e10),
    st.floats(-10, 10), st.floats(-10, 10))


@settings(max_examples=200)
@given(st.lists(segments_st, min_size=1, max_size=5), st.data())
def test_random_schedules_round_trip(segs, data):
    total = sum(s.duration for s in segs)
    gates = data.draw(st.lists(st.builds(
        InstantGate, st.floats(0, total), st.one_of(st.sampled_from(["x", "y"]),
                                                    st.floats(-7, 7)),
        st.floats(-7, 7)), max_size=3))
    s = Schedule(tuple(segs), tuple(gates))
    assert parse_schedule(serialize_schedule(s)) == s


def test_sample_field_examples():
    s = Schedule((Segment(25e-9, D0, -D0, OM),))
    f = sample_field(s, 12.5e-9)
    assert f.delta == pytest.approx(0.0, abs=1e-3)
    s = Schedule((Segment(10e-9, 3.0, 3.0, OM, math.pi / 2, math.pi / 2),))
    f = sample_field(s, 5e-9)
    assert f.omega_x == pytest.approx(0.0, abs=1e-6) and f.omega_y == OM and f.delta == 3.0
    with pytest.raises(OutOfRange):
        sample_field(s, 10e-9)
    with pytest.raises(OutOfRange):
        sample_field(s, -1e-12)


def test_boundary_belongs_to_later_segment():
    s = Schedule((Segment(1e-9, 1.0), Segment(1e-9, 2.0)))
    assert sample_field(s, 1e-9).delta == 2.0
    assert s.field_before(1e-9).delta == 1.0


def test_glzi_structure():
    s = build_glzi(D0, OM, 0.6, TP, TC)
    assert s.total_duration == pytest.approx(TC, rel=1e-15)
    a = s.annotations
    assert s.crossing_times() == pytest.approx((a["tau_1"], a["tau_2"]), abs=1e-21)
    assert a["tau_1"] == TP / 2
    for t in (a["tau_1"], a["tau_2"]):
        f = sample_field(s, t)
        assert f.delta == pytest.approx(0.0, abs=1e-3)
        assert math.hypot(f.omega_x, f.omega_y) == pytest.approx(OM)
    assert abs((a["tau_s"] - a["tau_1"]) - (a["tau_2"] - a["tau_s"])) <= 1e-12
    # loop closure
    assert np.allclose(sample_field(s, 0.0), s.field_before(s.total_duration), rtol=1e-12)
    assert len(s.gates) == 1 and s.gates[0].time == a["tau_s"]
    assert s.gates[0].angle == math.pi


def test_glzi_theta_zero_is_dlzi_plus_echo():
    g = build_glzi(D0, OM, 0.0, TP, TC)
    d = build_dlzi(D0, OM, 0.0, TP, TC)
    assert g.segments == d.segments
    assert d.gates == () and len(g.gates) == 1


def test_glzi_excursion_wraps_to_shorter_arc():
    s = build_glzi(D0, OM, 1.5 * math.pi, TP, TC)
    assert s.annotations["excursion"] == pytest.approx(-0.5 * math.pi)
    assert build_glzi(D0, OM, math.pi, TP, TC).annotations["excursion"] == math.pi


def test_invalid_timing():
    with pytest.raises(InvalidTiming):
        build_glzi(D0, OM, 0.0, TP, 40e-9)
    with pytest.raises(InvalidTiming):
        build_dlzi(D0, OM, 0.0, TP, 50e-9)


def test_dlzi_properties():
    a = build_dlzi(D0, OM, 0.3, TP, TC)
    assert [s.duration for s in a.segments] == [TP, 12.5e-9, 12.5e-9, TP, 25e-9]
    b = build_dlzi(D0, OM, 0.3, TP, 140e-9)
    for sa, sb in zip(a.segments, b.segments):
        assert (sa.delta_start, sa.delta_end, sa.omega, sa.phase_start) == \
               (sb.delta_start, sb.delta_end, sb.omega, sb.phase_start)
    assert [s.duration for s in b.segments] == pytest.approx([TP, 22.5e-9, 22.5e-9, TP, 45e-9])
    z, w = build_dlzi(D0, OM, 0.0, TP, TC), build_dlzi(D0, OM, TWO_PI, TP, TC)
    for t in np.linspace(0, TC, 50, endpoint=False):
        assert sample_field(z, t) == sample_field(w, t)


def test_t1_and_t2_builders():
    s = build_t1(118e-9)
    assert s.total_duration == 118e-9 and s.gates[0].time == 0.0
    assert tuple(sample_field(s, 50e-9)) == (0.0, 0.0, 0.0)
    s0 = build_t1(0.0)
    assert s0.total_duration == 0.0 and len(s0.gates) == 1
    e = build_t2_echo(50e-9)
    assert [g.time for g in e.gates] == [0.0, 50e-9, 100e-9]
    assert [g.angle for g in e.gates] == [math.pi / 2, math.pi, math.pi / 2]
    assert tuple(sample_field(e, 75e-9)) == (0.0, 0.0, 0.0)
    assert build_t2_echo(0.0).total_duration == 0.0


def test_segment_validation():
    with pytest.raises(NegativeDuration):
        Segment(0.0, 1.0)
    with pytest.raises(Exception):
        Segment(1e-9, 1.0, omega=-1.0)
