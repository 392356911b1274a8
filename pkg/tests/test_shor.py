"""Program compilation, readout decoding, and the end-to-end pipeline."""

import math
import warnings

import numpy as np
import pytest

from spinshor import (SHOR4, ChainParams, CompilationError, ExtractionError,
                      ShorSpec, ValidationError, bit_reverse,
                      build_transition_table, compile_shor4, extract_factor,
                      extract_period, ground_state, measure,
                      resonant_propagate, run_shor)

IDEAL_TOL = 1e-12


def ideal_distribution():
    probs = np.zeros(16)
    probs[[1, 3, 5, 7]] = 0.25
    return probs


def test_spec_validation():
    assert SHOR4.modulus == 4 and SHOR4.base == 3
    assert SHOR4.x_states == 4
    with pytest.raises(ValidationError):
        ShorSpec(modulus=1)
    with pytest.raises(ValidationError):
        ShorSpec(modulus=4, base=2)  # shares a factor
    with pytest.raises(ValidationError):
        ShorSpec(x_bits=0)


def test_bit_reverse():
    assert bit_reverse(0b01, 2) == 0b10
    assert bit_reverse(0b11, 2) == 0b11
    assert bit_reverse(0b100, 3) == 0b001
    assert bit_reverse(5, 4) == 10


def test_compiled_program_shape():
    program = compile_shor4(ChainParams(), 0.1, 0.1)
    assert len(program) == 16
    kinds = [p.kind for p in program]
    assert kinds.count("half_pi") == 8
    assert kinds.count("pi") == 8
    # every carrier sits on a known line of the default chain
    lines = {99.0, 101.0, 108.0, 118.0, 120.0, 122.0, 129.0, 131.0}
    assert {p.frequency for p in program} <= lines


def test_compiled_program_replays_to_ideal():
    params = ChainParams()
    program = compile_shor4(params, 0.1, 0.1)
    table = build_transition_table(params)
    replay = resonant_propagate(table, program, ground_state(params))
    assert np.abs(np.abs(replay) ** 2 - ideal_distribution()).max() < IDEAL_TOL


def test_compile_rejects_wrong_chain():
    with pytest.raises(ValidationError):
        compile_shor4(ChainParams(num_spins=3), 0.1, 0.1)


def test_compile_crowded_chain_keeps_actual_frequencies():
    # frequency_step = 3 J overlaps lines of different spins, so the
    # self-check runs on a widened reference; the program itself must
    # still carry the crowded chain's own lines
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = ChainParams(frequency_step=3.0, ising_constant=1.0)
    program = compile_shor4(params, 0.1, 0.1)
    assert len(program) == 16
    freqs = {p.frequency for p in program}
    # the crowding itself: spin 0 upper and the doubly-shifted spin 1
    # line coincide at 101 on this layout
    assert 101.0 in freqs
    assert max(freqs) == 110.0  # spin 3 upper line, omega_3 = 109


def test_compile_fails_without_coupling():
    # with J = 0 the conditional lines merge and the branch structure
    # cannot replay to the target distribution
    params = ChainParams(ising_constant=0.0)
    with pytest.raises(CompilationError, match="replay deviates"):
        compile_shor4(params, 0.1, 0.1)


def test_measure_marginal():
    state = np.zeros(16, dtype=np.complex128)
    state[[1, 3, 5, 7]] = 0.5  # the ideal output
    dist = measure(state)
    assert np.abs(dist.state_probabilities.sum() - 1.0) < 1e-12
    # x raw values 0 and 1 carry the weight; bit reversal maps raw 1 -> 2
    assert dist.x_probabilities[0] == pytest.approx(0.5)
    assert dist.x_probabilities[2] == pytest.approx(0.5)
    assert dist.x_probabilities[1] == 0.0
    assert dist.x_probabilities[3] == 0.0
    with pytest.raises(ValidationError):
        measure(state[:8])


def test_extract_period():
    assert extract_period(np.array([0.5, 0.0, 0.5, 0.0])) == 2
    assert extract_period(np.array([0.25, 0.25, 0.25, 0.25])) == 4
    # small leakage below threshold does not move the answer
    assert extract_period(np.array([0.47, 0.03, 0.47, 0.03])) == 2
    with pytest.raises(ExtractionError, match="single peak"):
        extract_period(np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(ExtractionError, match="does not divide"):
        extract_period(np.array([0.5, 0.0, 0.0, 0.0, 0.5, 0.0]))


def test_extract_factor():
    assert extract_factor(2) == 2  # gcd(3**1 - 1, 4)
    with pytest.raises(ExtractionError, match="odd"):
        extract_factor(3)
    with pytest.raises(ExtractionError, match="trivial"):
        extract_factor(4, ShorSpec(modulus=15, base=14))


def test_run_shor_end_to_end():
    result = run_shor(ChainParams(), 0.1, 0.1)
    assert result.period == 2
    assert result.factor == 2
    probs = result.distribution.state_probabilities
    assert np.abs(probs.sum() - 1.0) < 1e-9
    # every resonant output within a couple of percent of the ideal 1/4
    for p in (1, 3, 5, 7):
        assert abs(probs[p] - 0.25) < 0.02
    assert result.distribution.x_probabilities[0] > 0.45
    assert result.distribution.x_probabilities[2] > 0.45
