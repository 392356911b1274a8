"""Rectangular radio-frequency pulses and immutable pulse programs.

A pulse is defined by its carrier frequency, carrier phase, Rabi
frequency Omega and duration tau; the rotation angle it implements on a
resonant transition is Omega * tau.  Pulses are played back to back with
no gaps, and the carrier phase is referenced to the global t = 0, not to
the start of the individual pulse.
"""

import math
from dataclasses import dataclass, field

from .errors import ValidationError

__all__ = ["Pulse", "PulseSequence", "make_pulse", "rescale_rabi",
           "save_sequence", "load_sequence"]

HALF_PI = "half_pi"
PI = "pi"
CUSTOM = "custom"
_KINDS = (HALF_PI, PI, CUSTOM)
_KIND_ANGLE = {HALF_PI: math.pi / 2, PI: math.pi}
_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class Pulse:
    """One rectangular pulse.  ``kind`` tags the nominal rotation angle."""

    frequency: float
    phase: float
    rabi: float
    duration: float
    kind: str = CUSTOM

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown pulse kind {self.kind!r}")
        if not self.rabi > 0:
            raise ValidationError("rabi frequency must be positive")
        if not self.duration > 0:
            raise ValidationError("pulse duration must be positive")
        target = _KIND_ANGLE.get(self.kind)
        if target is not None and abs(self.angle - target) >= _ANGLE_TOL:
            raise ValidationError(
                f"{self.kind} pulse has angle {self.angle}, expected {target}"
            )

    @property
    def angle(self) -> float:
        """Rotation angle Omega * tau in radians."""
        return self.rabi * self.duration


def make_pulse(kind: str, frequency: float, phase: float, rabi: float) -> Pulse:
    """Build a half_pi or pi pulse, deriving the duration from the angle."""
    if kind not in _KIND_ANGLE:
        raise ValidationError(f"make_pulse needs kind 'half_pi' or 'pi', got {kind!r}")
    if not rabi > 0:
        raise ValidationError("rabi frequency must be positive")
    return Pulse(frequency=frequency, phase=phase, rabi=rabi,
                 duration=_KIND_ANGLE[kind] / rabi, kind=kind)


@dataclass(frozen=True)
class PulseSequence:
    """An ordered, gap-free pulse program.

    ``start_times`` are the absolute switch-on times with the first pulse
    starting at t = 0; the carrier phase convention makes these times part
    of the physics, so they are derived once and never mutated.
    """

    pulses: tuple[Pulse, ...] = ()
    start_times: tuple[float, ...] = field(init=False)

    def __post_init__(self) -> None:
        starts = []
        t = 0.0
        for pulse in self.pulses:
            starts.append(t)
            t += pulse.duration
        object.__setattr__(self, "start_times", tuple(starts))

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    @property
    def total_duration(self) -> float:
        return sum(p.duration for p in self.pulses)

    def append(self, pulse: Pulse) -> "PulseSequence":
        """Return a new sequence with ``pulse`` scheduled at the end."""
        return PulseSequence(self.pulses + (pulse,))


def rescale_rabi(sequence: PulseSequence, rabi_half_pi: float,
                 rabi_pi: float) -> PulseSequence:
    """Re-issue a sequence with new Rabi frequencies per pulse kind.

    Durations are recomputed from the nominal angles, so every half_pi
    pulse keeps its pi/2 rotation exactly and the start times contract or
    stretch accordingly.  Sequences containing custom pulses cannot be
    rescaled because their intended angle is not recorded.
    """
    if not rabi_half_pi > 0 or not rabi_pi > 0:
        raise ValidationError("rescaled rabi frequencies must be positive")
    rescaled = []
    for pulse in sequence:
        if pulse.kind == CUSTOM:
            raise ValidationError("cannot rescale a sequence with custom pulses")
        rabi = rabi_half_pi if pulse.kind == HALF_PI else rabi_pi
        rescaled.append(make_pulse(pulse.kind, pulse.frequency, pulse.phase, rabi))
    return PulseSequence(tuple(rescaled))


def save_sequence(sequence: PulseSequence, path) -> None:
    """Write a plain-text pulse table, one pulse per line.

    Columns are ``kind frequency phase rabi duration``, whitespace
    separated, floats at full round-trip precision.  Lines starting with
    ``#`` are comments.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# kind frequency phase rabi duration\n")
        for p in sequence:
            fh.write(f"{p.kind} {p.frequency!r} {p.phase!r} {p.rabi!r} {p.duration!r}\n")


def load_sequence(path) -> PulseSequence:
    """Read a pulse table written by :func:`save_sequence`."""
    pulses = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 5:
                raise ValidationError(
                    f"{path}:{lineno}: expected 5 fields, got {len(fields)}"
                )
            kind = fields[0]
            try:
                freq, phase, rabi, duration = map(float, fields[1:])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
            pulses.append(Pulse(frequency=freq, phase=phase, rabi=rabi,
                                duration=duration, kind=kind))
    return PulseSequence(tuple(pulses))
