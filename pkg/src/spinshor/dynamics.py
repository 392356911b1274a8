"""Fixed-step integration of the interaction-picture equation of motion.

During pulse n with carrier frequency w, phase phi and Rabi frequency
Omega, the amplitudes of the chain basis states obey

    i dc_p/dt = sum_m c_m V_pm exp{ i [ (E_p - E_m) t + r_pm (w t + phi) ] }

where the sum runs over the single-flip partners m of p, V_pm = -Omega/2,
and r_pm = -1 when E_p > E_m and +1 otherwise.  Phases are referenced to
the global t = 0, so the integration time inside a pulse is absolute,
never pulse-relative.

The right-hand side couples every state to S partners through phase
factors rotating at the pair detunings; nothing is truncated, so the
integrator sees the full non-resonant error the idealized gate picture
ignores.  A classic fourth-order Runge-Kutta rule with a step chosen
against the fastest phase rotation is accurate and cheap at this system
size; the inner loops are compiled with numba because the oscillatory
kernel dominates the runtime of every experiment.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .chain import ChainParams, TransitionTable
from .errors import IntegrationError, ValidationError
from .pulses import Pulse, PulseSequence

__all__ = ["IntegratorConfig", "TimeTrace", "basis_state", "ground_state",
           "derivative", "evolve_pulse", "evolve_sequence", "trace_sequence"]


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-size and acceptance settings for the fixed-step integrator.

    ``steps_per_period`` sets the resolution: the step is 1/steps_per_period
    of the period of the fastest phase factor appearing in the equation of
    motion for the pulse being integrated.  ``norm_tolerance`` is the
    allowed relative norm drift, checked after every pulse.
    ``trace_stride`` is the sampling interval, in integrator steps, of the
    population record kept by :func:`trace_sequence`.
    """

    steps_per_period: int = 128
    norm_tolerance: float = 1e-9
    trace_stride: int = 8

    def __post_init__(self) -> None:
        if self.steps_per_period < 4:
            raise ValidationError("steps_per_period must be at least 4")
        if not self.norm_tolerance > 0:
            raise ValidationError("norm_tolerance must be positive")
        if self.trace_stride < 1:
            raise ValidationError("trace_stride must be at least 1")


def basis_state(params: ChainParams, p: int) -> np.ndarray:
    """Amplitude vector of the basis state labeled ``p``."""
    if not 0 <= p < params.dim:
        raise ValidationError(f"basis label {p} out of range for {params.dim} states")
    state = np.zeros(params.dim, dtype=np.complex128)
    state[p] = 1.0
    return state


def ground_state(params: ChainParams) -> np.ndarray:
    """All spins up: the register initialized to zero."""
    return basis_state(params, 0)


def _coupling_arrays(table: TransitionTable):
    """Partner indices, orientation signs and signed gaps as (dim, S) arrays.

    For state p and driven spin k the partner is p with bit k flipped;
    the sign is +1 when p is the higher-energy member of that pair.  The
    equation of motion for the pair then reads, for each member,

        dc_p/dt = i (Omega/2) exp{ i sign_pk [ (gap - w) t - phi ] } c_partner
    """
    dim = table.params.dim
    num_spins = table.params.num_spins
    labels = np.arange(dim, dtype=np.int64)
    flips = (np.int64(1) << np.arange(num_spins, dtype=np.int64))
    idx = labels[:, None] ^ flips[None, :]
    sign = np.where(table.upper_mask, 1.0, -1.0)
    signed_gap = sign * table.pair_gap
    return idx, sign, signed_gap


def derivative(table: TransitionTable, pulse: Pulse, state: np.ndarray,
               t: float) -> np.ndarray:
    """Reference right-hand side of the equation of motion.

    The integrator uses a compiled equivalent; this numpy version is kept
    as the readable statement of the coupling structure and as the anchor
    for the integrator tests.
    """
    idx, sign, signed_gap = _coupling_arrays(table)
    state = np.asarray(state, dtype=np.complex128)
    theta = (signed_gap - sign * pulse.frequency) * t - sign * pulse.phase
    return 1j * 0.5 * pulse.rabi * (np.exp(1j * theta) * state[idx]).sum(axis=1)


@njit(cache=True)
def _deriv_into(out, c, idx, det, ph, half_rabi, t):
    dim, num_spins = idx.shape
    for p in range(dim):
        re = 0.0
        im = 0.0
        for k in range(num_spins):
            theta = det[p, k] * t + ph[p, k]
            ct = math.cos(theta)
            st = math.sin(theta)
            a = c[idx[p, k]]
            re += ct * a.real - st * a.imag
            im += ct * a.imag + st * a.real
        out[p] = complex(-half_rabi * im, half_rabi * re)


@njit(cache=True)
def _run_pulse(c, idx, det, ph, half_rabi, t0, h, n_steps, stride,
               times_out, probs_out):
    """March ``c`` through one pulse in place; return the sample count."""
    dim = c.shape[0]
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    tmp = np.empty(dim, np.complex128)
    n_out = 0
    for step in range(n_steps):
        t = t0 + step * h
        if stride > 0 and step % stride == 0:
            times_out[n_out] = t
            for p in range(dim):
                probs_out[n_out, p] = c[p].real * c[p].real + c[p].imag * c[p].imag
            n_out += 1
        _deriv_into(k1, c, idx, det, ph, half_rabi, t)
        for p in range(dim):
            tmp[p] = c[p] + 0.5 * h * k1[p]
        _deriv_into(k2, tmp, idx, det, ph, half_rabi, t + 0.5 * h)
        for p in range(dim):
            tmp[p] = c[p] + 0.5 * h * k2[p]
        _deriv_into(k3, tmp, idx, det, ph, half_rabi, t + 0.5 * h)
        for p in range(dim):
            tmp[p] = c[p] + h * k3[p]
        _deriv_into(k4, tmp, idx, det, ph, half_rabi, t + h)
        sixth = h / 6.0
        for p in range(dim):
            c[p] = c[p] + sixth * (k1[p] + 2.0 * (k2[p] + k3[p]) + k4[p])
    if stride > 0:
        t_end = t0 + n_steps * h
        times_out[n_out] = t_end
        for p in range(dim):
            probs_out[n_out, p] = c[p].real * c[p].real + c[p].imag * c[p].imag
        n_out += 1
    return n_out


def _step_count(pulse: Pulse, det: np.ndarray,
                config: IntegratorConfig) -> tuple[int, float]:
    """Number of steps and step size resolving the fastest phase factor."""
    f_max = math.hypot(float(np.abs(det).max()), pulse.rabi)
    h_target = (2.0 * math.pi / f_max) / config.steps_per_period
    n_steps = max(1, math.ceil(pulse.duration / h_target))
    return n_steps, pulse.duration / n_steps


_NO_TRACE = (np.empty(0, dtype=np.float64), np.empty((0, 1), dtype=np.float64))


def _propagate(table: TransitionTable, sequence: PulseSequence,
               state: np.ndarray, config: IntegratorConfig, record: bool,
               time_offset: float = 0.0):
    dim = table.params.dim
    c = np.asarray(state, dtype=np.complex128).copy()
    if c.shape != (dim,):
        raise ValidationError(f"state must have shape ({dim},), got {c.shape}")
    norm0 = float(np.linalg.norm(c))
    if norm0 == 0.0:
        raise ValidationError("initial state has zero norm")
    idx, sign, signed_gap = _coupling_arrays(table)

    times: list[np.ndarray] = []
    probs: list[np.ndarray] = []
    for number, (pulse, start) in enumerate(zip(sequence, sequence.start_times),
                                            start=1):
        t0 = time_offset + start
        det = signed_gap - sign * pulse.frequency
        ph = -sign * pulse.phase
        n_steps, h = _step_count(pulse, det, config)
        if record:
            stride = config.trace_stride
            n_samples = (n_steps + stride - 1) // stride + 1
            t_out = np.empty(n_samples, dtype=np.float64)
            p_out = np.empty((n_samples, dim), dtype=np.float64)
        else:
            stride = 0
            t_out, p_out = _NO_TRACE
        n_out = _run_pulse(c, idx, det, ph, 0.5 * pulse.rabi, t0, h,
                           n_steps, stride, t_out, p_out)
        drift = abs(float(np.linalg.norm(c)) / norm0 - 1.0)
        if drift > config.norm_tolerance:
            raise IntegrationError(
                f"norm drifted by {drift:.3e} after pulse {number} "
                f"(tolerance {config.norm_tolerance:.1e}); "
                "raise steps_per_period"
            )
        if record:
            times.append(t_out[:n_out])
            probs.append(p_out[:n_out])
    if not record:
        return c, None
    return c, _merge_trace(times, probs, dim)


def _merge_trace(times: list[np.ndarray], probs: list[np.ndarray],
                 dim: int) -> "TimeTrace":
    if not times:
        return TimeTrace(times=np.zeros(0), probabilities=np.zeros((0, dim)))
    kept_t = [times[0]]
    kept_p = [probs[0]]
    last = times[0][-1]
    for t, p in zip(times[1:], probs[1:]):
        keep = t > last
        kept_t.append(t[keep])
        kept_p.append(p[keep])
        if keep.any():
            last = t[keep][-1]
    return TimeTrace(times=np.concatenate(kept_t),
                     probabilities=np.vstack(kept_p))


@dataclass(frozen=True)
class TimeTrace:
    """Populations sampled along a pulse program.

    ``times`` is strictly increasing across pulse boundaries (the sample
    closing one pulse and the sample opening the next coincide and are
    stored once).  ``probabilities[i, p]`` is the population of basis
    state p at ``times[i]``.  ``markers`` is an optional list of times
    worth flagging in reports, e.g. the pulse boundaries of interest;
    the integrator itself never sets it.
    """

    times: np.ndarray
    probabilities: np.ndarray
    markers: tuple[float, ...] = ()

    def probability(self, p: int) -> np.ndarray:
        return self.probabilities[:, p]

    def to_csv(self, destination, states=None) -> None:
        """Write ``t`` plus one ``prob_p<label>`` column per requested state.

        ``destination`` is a path or an open text stream.  Marker times,
        when present, go first as ``# marker`` comment lines.
        """
        if states is None:
            states = range(self.probabilities.shape[1])
        states = list(states)
        if hasattr(destination, "write"):
            self._write_csv(destination, states)
        else:
            with open(destination, "w", encoding="ascii") as fh:
                self._write_csv(fh, states)

    def _write_csv(self, fh, states) -> None:
        for mark in self.markers:
            fh.write(f"# marker {mark!r}\n")
        fh.write("t," + ",".join(f"prob_p{p}" for p in states) + "\n")
        for i, t in enumerate(self.times):
            row = [repr(float(t))]
            row += [repr(float(self.probabilities[i, p])) for p in states]
            fh.write(",".join(row) + "\n")


def evolve_pulse(table: TransitionTable, pulse: Pulse, state: np.ndarray,
                 start_time: float = 0.0,
                 config: IntegratorConfig | None = None) -> np.ndarray:
    """Integrate a single pulse that switches on at ``start_time``.

    The carrier phase is still referenced to t = 0, so a late start is
    not equivalent to starting the same pulse at the origin.
    """
    if config is None:
        config = IntegratorConfig()
    final, _ = _propagate(table, PulseSequence((pulse,)), state, config,
                          record=False, time_offset=start_time)
    return final


def evolve_sequence(table: TransitionTable, sequence: PulseSequence,
                    state: np.ndarray,
                    config: IntegratorConfig | None = None) -> np.ndarray:
    """Integrate a pulse program and return the final amplitudes."""
    if config is None:
        config = IntegratorConfig()
    final, _ = _propagate(table, sequence, state, config, record=False)
    return final


def trace_sequence(table: TransitionTable, sequence: PulseSequence,
                   state: np.ndarray,
                   config: IntegratorConfig | None = None
                   ) -> tuple[np.ndarray, TimeTrace]:
    """Integrate a pulse program, also recording sampled populations."""
    if config is None:
        config = IntegratorConfig()
    final, trace = _propagate(table, sequence, state, config, record=True)
    return final, trace
