"""Pulse objects, sequences, rescaling and the on-disk pulse table."""

import math

import numpy as np
import pytest

from spinshor import (Pulse, PulseSequence, ValidationError, load_sequence,
                      make_pulse, rescale_rabi, save_sequence)

ANGLE_TOL = 1e-12


def test_kind_angle_invariant():
    p = make_pulse("half_pi", 101.0, 0.0, 0.25)
    assert abs(p.angle - math.pi / 2) < ANGLE_TOL
    p = make_pulse("pi", 101.0, 0.3, 0.25)
    assert abs(p.angle - math.pi) < ANGLE_TOL
    assert p.duration == math.pi / 0.25


def test_mislabelled_pulse_is_rejected():
    with pytest.raises(ValidationError):
        Pulse(frequency=101.0, phase=0.0, rabi=0.1, duration=1.0, kind="pi")
    with pytest.raises(ValidationError):
        Pulse(frequency=101.0, phase=0.0, rabi=0.1, duration=1.0, kind="sqrt")
    with pytest.raises(ValidationError):
        Pulse(frequency=101.0, phase=0.0, rabi=-0.1, duration=1.0)
    with pytest.raises(ValidationError):
        make_pulse("custom", 101.0, 0.0, 0.1)
    # custom pulses carry no angle promise, any positive pair is fine
    Pulse(frequency=101.0, phase=0.0, rabi=0.1, duration=1.0, kind="custom")


def test_sequence_start_times():
    seq = PulseSequence((
        make_pulse("half_pi", 101.0, 0.0, 0.1),
        make_pulse("pi", 99.0, 0.5, 0.2),
        make_pulse("half_pi", 131.0, 1.0, 0.1),
    ))
    d0 = math.pi / 2 / 0.1
    d1 = math.pi / 0.2
    assert seq.start_times == (0.0, d0, d0 + d1)
    assert math.isclose(seq.total_duration, d0 + d1 + d0, rel_tol=1e-15)
    longer = seq.append(make_pulse("pi", 108.0, 0.0, 0.1))
    assert len(longer) == 4
    assert longer.start_times[3] == pytest.approx(seq.total_duration)
    assert len(seq) == 3  # append does not mutate


def test_rescale_preserves_angles():
    rng = np.random.default_rng(5)
    pulses = []
    for _ in range(12):
        kind = "half_pi" if rng.integers(2) else "pi"
        pulses.append(make_pulse(kind, float(rng.uniform(90, 140)),
                                 float(rng.uniform(0, 2 * math.pi)),
                                 float(rng.uniform(0.05, 0.5))))
    seq = PulseSequence(tuple(pulses))
    out = rescale_rabi(seq, 0.51639, 0.25)
    assert len(out) == len(seq)
    for before, after in zip(seq, out):
        assert after.kind == before.kind
        assert after.frequency == before.frequency
        assert after.phase == before.phase
        assert abs(after.angle - before.angle) < ANGLE_TOL
        assert after.rabi == (0.51639 if after.kind == "half_pi" else 0.25)


def test_rescale_rejects_custom():
    seq = PulseSequence((Pulse(101.0, 0.0, 0.1, 1.0, "custom"),))
    with pytest.raises(ValidationError):
        rescale_rabi(seq, 0.1, 0.1)
    with pytest.raises(ValidationError):
        rescale_rabi(PulseSequence(()), 0.0, 0.1)


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    pulses = [Pulse(float(rng.uniform(90, 140)),
                    float(rng.uniform(0, 2 * math.pi)),
                    float(rng.uniform(0.05, 0.5)),
                    float(rng.uniform(0.5, 30.0)),
                    "custom") for _ in range(8)]
    pulses.append(make_pulse("pi", 122.0, math.pi / 4, 0.1))
    seq = PulseSequence(tuple(pulses))
    path = tmp_path / "table.seq"
    save_sequence(seq, path)
    loaded = load_sequence(path)
    # repr round-trips doubles exactly, so equality is bitwise
    assert loaded == seq


def test_load_rejects_malformed_lines(tmp_path):
    path = tmp_path / "bad.seq"
    path.write_text("# header\ncustom 101.0 0.0 0.1\n")
    with pytest.raises(ValidationError, match="expected 5 fields"):
        load_sequence(path)
    path.write_text("custom 101.0 zero 0.1 1.0\n")
    with pytest.raises(ValidationError):
        load_sequence(path)
    path.write_text("pi 101.0 0.0 0.1 1.0\n")  # angle is not pi
    with pytest.raises(ValidationError):
        load_sequence(path)
