"""Closed-form two-level propagator, resonant gate action, loop designs."""

import math

import numpy as np
import pytest

from spinshor import (ChainParams, PulseSequence, ValidationError,
                      build_transition_table, design_rabi,
                      design_rabi_for_chain, effective_rabi, ground_state,
                      make_pulse, resonant_propagate, resonant_transitions,
                      two_level_step)

ATOL = 1e-12


def test_effective_rabi():
    assert effective_rabi(3.0, 4.0) == 5.0
    assert effective_rabi(0.3, 0.0) == 0.3


def test_two_level_step_is_unitary():
    rng = np.random.default_rng(2)
    for _ in range(50):
        c = rng.normal(size=2) + 1j * rng.normal(size=2)
        c /= np.linalg.norm(c)
        out = two_level_step(c[0], c[1],
                             rabi=float(rng.uniform(0.01, 2.0)),
                             detuning=float(rng.uniform(-5.0, 5.0)),
                             duration=float(rng.uniform(0.1, 50.0)),
                             phase=float(rng.uniform(0, 2 * math.pi)))
        assert abs(abs(out[0]) ** 2 + abs(out[1]) ** 2 - 1.0) < ATOL


def test_two_level_step_resonant_flop():
    # on resonance a pi pulse moves all population across the pair
    lo, up = two_level_step(1.0, 0.0, rabi=0.2, detuning=0.0,
                            duration=math.pi / 0.2)
    assert abs(lo) < ATOL
    assert abs(abs(up) - 1.0) < ATOL
    # and a half_pi pulse splits it evenly
    lo, up = two_level_step(1.0, 0.0, rabi=0.2, detuning=0.0,
                            duration=math.pi / 0.4, phase=1.3)
    assert abs(abs(lo) ** 2 - 0.5) < ATOL
    assert abs(abs(up) ** 2 - 0.5) < ATOL


def test_two_level_step_detuned_transfer_ceiling():
    # maximum transfer off resonance is rabi^2 / (rabi^2 + detuning^2),
    # reached when the generalized angle hits pi
    rabi, det = 0.3, 0.4
    omega = effective_rabi(rabi, det)
    _, up = two_level_step(1.0, 0.0, rabi=rabi, detuning=det,
                           duration=math.pi / omega)
    assert abs(abs(up) ** 2 - rabi ** 2 / omega ** 2) < ATOL


def test_two_level_step_closed_loop():
    # a 2 pi generalized rotation is the identity up to a sign
    rabi, det = 0.3, 0.4
    omega = effective_rabi(rabi, det)
    lo, up = two_level_step(0.8, 0.6j, rabi=rabi, detuning=det,
                            duration=2 * math.pi / omega, phase=0.7)
    assert abs(lo + 0.8) < 1e-12
    assert abs(up + 0.6j) < 1e-12


def test_resonant_transitions_finds_lines():
    table = build_transition_table(ChainParams())
    hits = resonant_transitions(table, 131.0)
    assert hits.size == 4  # spin-3 line conditioned on spin 2 ground
    assert set(table.spin[hits].tolist()) == {3}
    for idx in hits:
        assert (int(table.lower[idx]) >> 2) & 1 == 0
    assert resonant_transitions(table, 120.0).size == 4
    assert resonant_transitions(table, 107.0).size == 0


def test_resonant_propagate_single_pulses():
    params = ChainParams()
    table = build_transition_table(params)
    state = ground_state(params)
    # pi on the spin-3 up line from the ground state excites spin 3
    out = resonant_propagate(
        table, PulseSequence((make_pulse("pi", 131.0, 0.0, 0.1),)), state)
    probs = np.abs(out) ** 2
    assert abs(probs[0b1000] - 1.0) < ATOL
    # half_pi splits between p=0 and p=8
    out = resonant_propagate(
        table, PulseSequence((make_pulse("half_pi", 131.0, 0.25, 0.1),)), state)
    probs = np.abs(out) ** 2
    assert abs(probs[0] - 0.5) < ATOL
    assert abs(probs[0b1000] - 0.5) < ATOL
    # the conditional line (spin 2 excited) does nothing to the ground state
    out = resonant_propagate(
        table, PulseSequence((make_pulse("pi", 129.0, 0.0, 0.1),)), state)
    assert abs(np.abs(out[0]) - 1.0) < ATOL


def test_resonant_propagate_is_unitary_and_validates():
    params = ChainParams()
    table = build_transition_table(params)
    rng = np.random.default_rng(9)
    state = rng.normal(size=16) + 1j * rng.normal(size=16)
    state /= np.linalg.norm(state)
    seq = PulseSequence((
        make_pulse("half_pi", 122.0, 0.1, 0.2),
        make_pulse("pi", 99.0, 0.9, 0.05),
        make_pulse("pi", 110.0, 2.0, 0.3),
    ))
    out = resonant_propagate(table, seq, state)
    assert abs(np.linalg.norm(out) - 1.0) < ATOL
    assert not np.shares_memory(out, state)
    with pytest.raises(ValidationError, match="drives no transition"):
        resonant_propagate(
            table, PulseSequence((make_pulse("pi", 105.0, 0.0, 0.1),)), state)
    with pytest.raises(ValidationError, match="shape"):
        resonant_propagate(table, seq, state[:8])


def test_design_rabi_formulas():
    for k in range(1, 6):
        d = design_rabi(2.0, "pi", k)
        assert d.rabi == 2.0 / math.sqrt(4.0 * k * k - 1.0)
        assert abs(d.spectator_angle - 2 * math.pi * k) < 1e-9
        d = design_rabi(2.0, "half_pi", k)
        assert d.rabi == 2.0 / math.sqrt(16.0 * k * k - 1.0)
        assert abs(d.spectator_angle - 2 * math.pi * k) < 1e-9
        assert abs(d.rabi * d.duration - math.pi / 2) < ATOL


def test_design_rabi_reference_values():
    # half_pi series for detuning 2: 2/sqrt(16 k^2 - 1)
    rounded = [round(design_rabi_for_chain(1.0, "half_pi", k).rabi, 3)
               for k in range(1, 6)]
    assert rounded == [0.516, 0.252, 0.167, 0.125, 0.100]
    fast = design_rabi_for_chain(1.0, "pi", 1)
    assert abs(fast.rabi - 2.0 / math.sqrt(3.0)) < ATOL


def test_design_rabi_validation():
    with pytest.raises(ValidationError):
        design_rabi(0.0, "pi")
    with pytest.raises(ValidationError):
        design_rabi(2.0, "pi", 0)
    with pytest.raises(ValidationError):
        design_rabi(2.0, "custom")
    with pytest.raises(ValidationError):
        design_rabi_for_chain(0.0, "pi")
