"""Pulse-level simulation of order finding on an Ising spin chain.

The package models a chain of spins with individually resolvable
transition frequencies, compiles a small factoring algorithm into a
program of rectangular pulses, integrates the interaction-picture
dynamics without the resonant approximation, and measures how far the
real pulses stray from the idealized gates they implement.
"""

from .chain import (ChainParams, TransitionEntry, TransitionTable,
                    basis_energy, build_transition_table,
                    resonant_frequency_catalog, spin_frequency,
                    transition_frequency)
from .dynamics import (IntegratorConfig, TimeTrace, basis_state, derivative,
                       evolve_pulse, evolve_sequence, ground_state,
                       trace_sequence)
from .errors import (CompilationError, ExtractionError, IntegrationError,
                     ValidationError)
from .experiments import (MEAN_TRIAL, RESONANT_STATES, ExperimentResult,
                          ExperimentRow, ExperimentSpec, emit_csv,
                          perturb_durations, perturb_phases, run_minimal_time,
                          run_noise_study, run_single, run_trace,
                          sweep_detuning, sweep_rabi)
from .oracles import (TwoPiKDesign, design_rabi, design_rabi_for_chain,
                      effective_rabi, resonant_propagate,
                      resonant_transitions, two_level_step)
from .pulses import (Pulse, PulseSequence, load_sequence, make_pulse,
                     rescale_rabi, save_sequence)
from .rng import SplitMix64
from .shor import (SHOR4, MeasurementDistribution, ShorResult, ShorSpec,
                   bit_reverse, compile_shor4, extract_factor, extract_period,
                   measure, run_shor)

__version__ = "0.1.0"

__all__ = [
    "ChainParams", "TransitionEntry", "TransitionTable", "basis_energy",
    "build_transition_table", "resonant_frequency_catalog", "spin_frequency",
    "transition_frequency",
    "IntegratorConfig", "TimeTrace", "basis_state", "derivative",
    "evolve_pulse", "evolve_sequence", "ground_state", "trace_sequence",
    "CompilationError", "ExtractionError", "IntegrationError",
    "ValidationError",
    "MEAN_TRIAL", "RESONANT_STATES", "ExperimentResult", "ExperimentRow",
    "ExperimentSpec", "emit_csv", "perturb_durations", "perturb_phases",
    "run_minimal_time", "run_noise_study", "run_single", "run_trace",
    "sweep_detuning", "sweep_rabi",
    "TwoPiKDesign", "design_rabi", "design_rabi_for_chain", "effective_rabi",
    "resonant_propagate", "resonant_transitions", "two_level_step",
    "Pulse", "PulseSequence", "load_sequence", "make_pulse", "rescale_rabi",
    "save_sequence",
    "SplitMix64",
    "SHOR4", "MeasurementDistribution", "ShorResult", "ShorSpec",
    "bit_reverse", "compile_shor4", "extract_factor", "extract_period",
    "measure", "run_shor",
    "__version__",
]
