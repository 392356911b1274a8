"""Closed-form propagators used to cross-check the numerical integrator.

Two results from the rotating-frame treatment of a driven two-level
system are implemented here:

* the exact evolution of an isolated pair of levels under a rectangular
  pulse of arbitrary detuning (the generalized Rabi solution), and
* the resonant limit of that solution applied pairwise to a full chain
  register, which is the idealized gate action a pulse program is
  compiled against.

Both are exactly unitary, so they double as oracles for norm and
probability bookkeeping in the integrator tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chain import TransitionTable
from .errors import ValidationError
from .pulses import HALF_PI, PI, Pulse, PulseSequence

__all__ = ["effective_rabi", "two_level_step", "resonant_transitions",
           "resonant_propagate", "TwoPiKDesign", "design_rabi",
           "design_rabi_for_chain"]

# Relative slack (in units of the chain frequency step) when deciding
# whether a pulse is resonant with a transition.
_RESONANCE_RTOL = 1e-9


def effective_rabi(rabi: float, detuning: float) -> float:
    """Generalized Rabi frequency sqrt(rabi**2 + detuning**2)."""
    return math.hypot(rabi, detuning)


def two_level_step(c_lower: complex, c_upper: complex, rabi: float,
                   detuning: float, duration: float,
                   phase: float = 0.0) -> tuple[complex, complex]:
    """Propagate an isolated two-level pair through one rectangular pulse.

    Parameters
    ----------
    c_lower, c_upper
        Interaction-picture amplitudes of the lower- and higher-energy
        member of the pair at the start of the pulse.
    rabi
        Rabi frequency of the drive.
    detuning
        Transition frequency minus carrier frequency.
    duration
        Pulse length.
    phase
        Carrier phase at the start of the pulse.  For a pulse that does
        not start at t = 0 the accumulated carrier advance folds into this
        argument.

    Returns
    -------
    (c_lower, c_upper)
        Amplitudes after the pulse, in a frame co-rotating with the drive.
        The transformation is exactly unitary; relative phases between
        this pair and spectator levels are frame-dependent, so only the
        moduli are meaningful when comparing against the full integrator
        off resonance.
    """
    omega_e = effective_rabi(rabi, detuning)
    half = 0.5 * omega_e * duration
    cos_half = math.cos(half)
    sinc = math.sin(half) / omega_e
    mix = 1j * rabi * sinc
    diag_lower = cos_half + 1j * detuning * sinc
    diag_upper = cos_half - 1j * detuning * sinc
    drive = complex(math.cos(phase), math.sin(phase))
    new_lower = diag_lower * c_lower + mix * drive * c_upper
    new_upper = diag_upper * c_upper + mix * drive.conjugate() * c_lower
    return new_lower, new_upper


def resonant_transitions(table: TransitionTable, frequency: float) -> np.ndarray:
    """Indices of table entries whose gap matches the carrier frequency.

    Matching uses a relative tolerance against the chain frequency step,
    so only transitions that are exactly on the carrier (up to float
    rounding in the gap arithmetic) count as resonant.  This is the
    resonance notion used by :func:`resonant_propagate` and by the
    program compiler when it decides whether a carrier addresses a
    single spectral line.
    """
    tol = _RESONANCE_RTOL * table.params.frequency_step
    return np.nonzero(np.abs(table.gap - frequency) <= tol)[0]


def resonant_propagate(table: TransitionTable, sequence: PulseSequence,
                       state: np.ndarray) -> np.ndarray:
    """Apply a pulse program in the idealized resonant approximation.

    Every pulse acts only on the transition pairs whose gap equals the
    carrier frequency; all other amplitudes are untouched.  For a pulse
    of angle alpha = rabi * duration and phase phi, each resonant pair
    (lower m, upper p) transforms as

        c_m -> cos(alpha/2) c_m + i e^{+i phi} sin(alpha/2) c_p
        c_p -> cos(alpha/2) c_p + i e^{-i phi} sin(alpha/2) c_m

    which is the zero-detuning limit of :func:`two_level_step`.  The angle
    is taken from the pulse kind when it is tagged half_pi or pi, so the
    rotation is exact rather than inheriting the rounding of
    rabi * duration.

    Raises
    ------
    ValidationError
        If a pulse is resonant with no transition in the table.
    """
    state = np.asarray(state, dtype=np.complex128).copy()
    if state.shape != (table.params.dim,):
        raise ValidationError(
            f"state must have shape ({table.params.dim},), got {state.shape}"
        )
    for pulse in sequence:
        hits = resonant_transitions(table, pulse.frequency)
        if hits.size == 0:
            raise ValidationError(
                f"pulse at frequency {pulse.frequency} drives no transition"
            )
        if pulse.kind == HALF_PI:
            alpha = math.pi / 2
        elif pulse.kind == PI:
            alpha = math.pi
        else:
            alpha = pulse.angle
        cos_half = math.cos(alpha / 2)
        sin_half = math.sin(alpha / 2)
        up = 1j * complex(math.cos(pulse.phase), math.sin(pulse.phase)) * sin_half
        down = 1j * complex(math.cos(-pulse.phase), math.sin(-pulse.phase)) * sin_half
        for idx in hits:
            m = int(table.lower[idx])
            p = int(table.upper[idx])
            c_m = state[m]
            c_p = state[p]
            state[m] = cos_half * c_m + up * c_p
            state[p] = cos_half * c_p + down * c_m
    return state


@dataclass(frozen=True)
class TwoPiKDesign:
    """A Rabi frequency chosen so off-resonant spectators close a 2 pi k loop.

    For a spectator pair detuned by ``detuning`` the generalized Rabi
    angle accumulated over the pulse is effective_rabi * duration; picking
    the Rabi frequency so that angle equals 2 pi k returns the spectator
    exactly to its initial state (up to phase) while the resonant pair
    still sees its nominal rotation.
    """

    kind: str
    k: int
    detuning: float
    rabi: float
    duration: float

    @property
    def spectator_angle(self) -> float:
        return effective_rabi(self.rabi, self.detuning) * self.duration


def design_rabi(detuning: float, kind: str, k: int = 1) -> TwoPiKDesign:
    """Solve effective_rabi(rabi, detuning) * duration = 2 pi k for rabi.

    For a pi pulse (duration = pi / rabi) the condition gives
    rabi = |detuning| / sqrt(4 k**2 - 1); for a half_pi pulse
    (duration = pi / (2 rabi)) it gives rabi = |detuning| / sqrt(16 k**2 - 1).
    Larger k means a gentler drive and a longer pulse.
    """
    if k < 1:
        raise ValidationError("k must be a positive integer")
    if detuning == 0:
        raise ValidationError("detuning must be nonzero")
    mag = abs(detuning)
    if kind == PI:
        rabi = mag / math.sqrt(4.0 * k * k - 1.0)
        duration = math.pi / rabi
    elif kind == HALF_PI:
        rabi = mag / math.sqrt(16.0 * k * k - 1.0)
        duration = math.pi / (2.0 * rabi)
    else:
        raise ValidationError(f"design_rabi needs kind 'half_pi' or 'pi', got {kind!r}")
    return TwoPiKDesign(kind=kind, k=k, detuning=mag, rabi=rabi, duration=duration)


def design_rabi_for_chain(ising_constant: float, kind: str,
                          k: int = 1) -> TwoPiKDesign:
    """2 pi k design for the chain's dominant spectator detuning 2 J.

    The nearest off-resonant transitions of a driven spin sit one Ising
    shift away from the target line, i.e. at detuning 2 J, so suppressing
    that set is the natural design point.
    """
    if not ising_constant > 0:
        raise ValidationError("ising constant must be positive")
    return design_rabi(2.0 * ising_constant, kind, k)
