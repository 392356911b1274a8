"""Scripted studies of the factoring program: sweeps, traces, noise runs.

Every study consumes an :class:`ExperimentSpec` and produces an
:class:`ExperimentResult`, a flat table with the sixteen final-state
populations per row plus the summary columns used by the reports.
Randomness is explicit: noise studies draw from one SplitMix64 stream
per trial, seeded with the experiment seed plus the trial index, so any
single row of any study can be regenerated in isolation.  The same seed
draws the same underlying unit sequence for every amplitude, so noise
realizations scale linearly with epsilon (common random numbers).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .chain import ChainParams, build_transition_table
from .dynamics import (IntegratorConfig, TimeTrace, evolve_sequence,
                       ground_state, trace_sequence)
from .errors import ValidationError
from .oracles import design_rabi_for_chain
from .pulses import CUSTOM, HALF_PI, PI, PulseSequence, rescale_rabi
from .rng import SplitMix64
from .shor import compile_shor4

__all__ = [
    "RESONANT_STATES", "RABI_GRID", "DETUNING_GRID", "PHASE_EPSILONS",
    "DURATION_EPSILONS", "MEAN_TRIAL",
    "ExperimentSpec", "ExperimentRow", "ExperimentResult",
    "perturb_phases", "perturb_durations",
    "run_single", "sweep_rabi", "sweep_detuning", "run_trace",
    "run_noise_study", "run_minimal_time", "emit_csv",
]

# Output states the ideal program populates (|1>, |3>, |5>, |7>).
RESONANT_STATES = (1, 3, 5, 7)

# Default grid for the Rabi sweep: the four good working points, the
# three midpoints between them where the non-resonant error peaks, and
# the fastest single-loop point.
RABI_GRID = (0.1, 0.112, 0.125, 0.1458, 0.1666, 0.2083, 0.25, 0.51639)

# Default grid for the frequency-step sweep.
DETUNING_GRID = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)

# Default noise half-widths: phases in radians, durations in time units.
PHASE_EPSILONS = (0.0, 0.1, 0.5, 0.8)
DURATION_EPSILONS = (0.0, 1.0, 2.0)

# Trial index carried by the trial-averaged row of a noise study.
MEAN_TRIAL = -1

_KINDS = ("single_run", "sweep_rabi", "sweep_detuning", "trace",
          "phase_noise", "duration_noise", "minimal_time")

# End times of these pulses (0-based indices) are flagged in traces:
# the three readout pulses closing the transform.
_TRACE_MARKER_PULSES = (13, 14, 15)


@dataclass(frozen=True)
class ExperimentSpec:
    """One declarative experiment: what to run, on which chain, how driven.

    ``rabi`` is the uniform Rabi frequency; ``rabi_half_pi`` and
    ``rabi_pi`` override it per pulse kind when set.  ``grid`` and
    ``epsilons`` replace the per-kind defaults when given.  ``seed`` and
    ``trials`` only matter for the noise studies.
    """

    kind: str = "single_run"
    params: ChainParams = field(default_factory=ChainParams)
    rabi: float = 0.1
    rabi_half_pi: float | None = None
    rabi_pi: float | None = None
    grid: tuple[float, ...] | None = None
    epsilons: tuple[float, ...] | None = None
    seed: int = 11
    trials: int = 20
    config: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValidationError(
                f"unknown experiment kind {self.kind!r}; pick one of {_KINDS}"
            )
        half, pi_ = self.resolved_rabi()
        if not half > 0 or not pi_ > 0:
            raise ValidationError("rabi frequencies must be positive")
        if self.grid is not None:
            if len(self.grid) < 1:
                raise ValidationError("grid needs at least one point")
            if any(not g > 0 for g in self.grid):
                raise ValidationError("grid values must be positive")
        if self.epsilons is not None and any(e < 0 for e in self.epsilons):
            raise ValidationError("epsilon must be non-negative")
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")

    def resolved_rabi(self) -> tuple[float, float]:
        """Effective (half_pi, pi) Rabi frequencies."""
        half = self.rabi if self.rabi_half_pi is None else self.rabi_half_pi
        pi_ = self.rabi if self.rabi_pi is None else self.rabi_pi
        return half, pi_


# Read-only rows: probabilities arrays are shared, never mutated.
@dataclass(frozen=True)
class ExperimentRow:
    """One run: independent-variable values plus the 16 populations."""

    variables: tuple[float, ...]
    probabilities: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ValidationError(
                f"row probabilities sum to {probs.sum()!r}, not 1"
            )

    @property
    def resonant(self) -> np.ndarray:
        return self.probabilities[list(RESONANT_STATES)]

    @property
    def min_resonant(self) -> float:
        return float(self.resonant.min())

    @property
    def max_resonant(self) -> float:
        return float(self.resonant.max())

    @property
    def total_error(self) -> float:
        return 1.0 - float(self.resonant.sum())

    @property
    def max_error_state(self) -> int:
        masked = self.probabilities.copy()
        masked[list(RESONANT_STATES)] = -1.0
        return int(masked.argmax())

    @property
    def max_error_prob(self) -> float:
        return float(self.probabilities[self.max_error_state])


@dataclass(frozen=True)
class ExperimentResult:
    """Rows of one study plus the metadata lines echoed into reports."""

    kind: str
    columns: tuple[str, ...]
    rows: tuple[ExperimentRow, ...]
    meta: tuple[tuple[str, str], ...] = ()

    def column(self, name: str) -> np.ndarray:
        """Values of one independent-variable column across all rows."""
        idx = self.columns.index(name)
        return np.array([row.variables[idx] for row in self.rows])

    def select(self, **values) -> tuple[ExperimentRow, ...]:
        """Rows whose named variables equal the given values exactly."""
        idx = {name: self.columns.index(name) for name in values}
        return tuple(
            row for row in self.rows
            if all(row.variables[idx[n]] == v for n, v in values.items())
        )


def perturb_phases(sequence: PulseSequence, epsilon: float,
                   seed: int) -> PulseSequence:
    """Add an independent uniform draw from [-epsilon, epsilon] per phase.

    Frequencies, Rabi frequencies and durations are untouched, so the
    perturbed program still implements the nominal rotation angles, just
    about tilted axes.  epsilon = 0 returns the input sequence itself.
    """
    if epsilon < 0:
        raise ValidationError("epsilon must be non-negative")
    if epsilon == 0.0:
        return sequence
    rng = SplitMix64(seed)
    pulses = tuple(
        replace(p, phase=p.phase + rng.uniform(-epsilon, epsilon))
        for p in sequence
    )
    return PulseSequence(pulses)


def perturb_durations(sequence: PulseSequence, epsilon: float,
                      seed: int) -> PulseSequence:
    """Add an independent uniform draw from [-epsilon, epsilon] per duration.

    Rabi frequencies stay fixed, so rotation angles pick up errors of up
    to rabi * epsilon and the pulses are retagged as custom; start times
    are rebuilt from the new durations.  epsilon = 0 returns the input
    sequence itself.

    Raises
    ------
    ValidationError
        If epsilon is negative, or not smaller than the shortest pulse
        (durations must stay positive for every possible draw).
    """
    if epsilon < 0:
        raise ValidationError("epsilon must be non-negative")
    if epsilon == 0.0:
        return sequence
    shortest = min(p.duration for p in sequence)
    if epsilon >= shortest:
        raise ValidationError(
            f"epsilon {epsilon} reaches the shortest pulse duration "
            f"{shortest}; durations must stay positive"
        )
    rng = SplitMix64(seed)
    pulses = tuple(
        replace(p, duration=p.duration + rng.uniform(-epsilon, epsilon),
                kind=CUSTOM)
        for p in sequence
    )
    return PulseSequence(pulses)


def _probabilities(table, sequence, config) -> np.ndarray:
    state = evolve_sequence(table, sequence,
                            ground_state(table.params), config)
    return np.abs(state) ** 2


def run_single(spec: ExperimentSpec) -> ExperimentResult:
    """One run at the spec's parameters; sixteen populations, one row."""
    half, pi_ = spec.resolved_rabi()
    program = compile_shor4(spec.params, half, pi_)
    table = build_transition_table(spec.params)
    probs = _probabilities(table, program, spec.config)
    row = ExperimentRow(variables=(), probabilities=probs)
    meta = (("rabi_half_pi", repr(half)), ("rabi_pi", repr(pi_)),
            ("total_duration", repr(program.total_duration)))
    return ExperimentResult(kind="single_run", columns=(), rows=(row,),
                            meta=meta)


def sweep_rabi(spec: ExperimentSpec) -> ExperimentResult:
    """Re-run the program over a grid of uniform Rabi frequencies.

    The program is compiled once and re-issued per grid point with
    :func:`rescale_rabi`, so every pulse keeps its nominal rotation
    angle and only the drive strength (hence duration) changes.
    """
    grid = RABI_GRID if spec.grid is None else spec.grid
    program = compile_shor4(spec.params, *spec.resolved_rabi())
    table = build_transition_table(spec.params)
    rows = []
    for rabi in grid:
        scaled = rescale_rabi(program, rabi, rabi)
        probs = _probabilities(table, scaled, spec.config)
        rows.append(ExperimentRow(variables=(float(rabi),),
                                  probabilities=probs))
    return ExperimentResult(kind="sweep_rabi", columns=("rabi",),
                            rows=tuple(rows))


def sweep_detuning(spec: ExperimentSpec) -> ExperimentResult:
    """Re-run the program over a grid of chain frequency steps.

    The drive is kept fixed while the spectral crowding changes; the
    metadata reports the smallest grid value whose deviation from the
    ideal 1/4 populations exceeds three times the deviation at the
    largest grid value (the onset of significant degradation).
    """
    grid = DETUNING_GRID if spec.grid is None else spec.grid
    half, pi_ = spec.resolved_rabi()
    rows = []
    for step in grid:
        params = replace(spec.params, frequency_step=float(step))
        program = compile_shor4(params, half, pi_)
        probs = _probabilities(build_transition_table(params), program,
                               spec.config)
        rows.append(ExperimentRow(variables=(float(step),),
                                  probabilities=probs))
    deviations = {row.variables[0]: np.abs(row.resonant - 0.25).max()
                  for row in rows}
    widest = max(deviations)
    onset = [s for s in sorted(deviations)
             if deviations[s] > 3.0 * deviations[widest]]
    meta = (("deviation_onset", repr(max(onset)) if onset else "none"),)
    return ExperimentResult(kind="sweep_detuning",
                            columns=("frequency_step",),
                            rows=tuple(rows), meta=meta)


def run_trace(spec: ExperimentSpec, traced_state: int = 3) -> TimeTrace:
    """Sampled populations along the program, for plotting one state.

    The full sixteen-column trace is returned; ``traced_state`` is
    validated here so reports fail early, and the end times of the three
    readout pulses are attached as markers.
    """
    if not 0 <= traced_state < spec.params.dim:
        raise ValidationError(
            f"traced state {traced_state} out of range for "
            f"{spec.params.dim} states"
        )
    half, pi_ = spec.resolved_rabi()
    program = compile_shor4(spec.params, half, pi_)
    table = build_transition_table(spec.params)
    _, trace = trace_sequence(table, program, ground_state(spec.params),
                              spec.config)
    ends = tuple(program.start_times[i] + program.pulses[i].duration
                 for i in _TRACE_MARKER_PULSES)
    return replace(trace, markers=ends)


def run_noise_study(spec: ExperimentSpec) -> ExperimentResult:
    """Monte-Carlo perturbation study of the compiled program.

    For each epsilon, ``spec.trials`` perturbed copies of the program
    are integrated, one per trial with seed ``spec.seed + trial``; the
    per-trial rows are followed by a trial-averaged row carrying
    ``MEAN_TRIAL`` in the trial column.  At epsilon = 0 the perturbation
    is the identity, so the single unperturbed run is recorded once per
    trial slot without re-integrating.
    """
    if spec.kind == "phase_noise":
        perturb, defaults = perturb_phases, PHASE_EPSILONS
    elif spec.kind == "duration_noise":
        perturb, defaults = perturb_durations, DURATION_EPSILONS
    else:
        raise ValidationError(
            f"noise study needs kind phase_noise or duration_noise, "
            f"got {spec.kind!r}"
        )
    epsilons = defaults if spec.epsilons is None else spec.epsilons
    program = compile_shor4(spec.params, *spec.resolved_rabi())
    table = build_transition_table(spec.params)
    rows = []
    for eps in epsilons:
        if eps == 0.0:
            probs = _probabilities(table, program, spec.config)
            trial_probs = [probs] * spec.trials
        else:
            trial_probs = [
                _probabilities(table, perturb(program, eps, spec.seed + t),
                               spec.config)
                for t in range(spec.trials)
            ]
        for t, probs in enumerate(trial_probs):
            rows.append(ExperimentRow(variables=(float(eps), float(t)),
                                      probabilities=probs))
        mean = np.mean(trial_probs, axis=0)
        rows.append(ExperimentRow(variables=(float(eps), float(MEAN_TRIAL)),
                                  probabilities=mean))
    meta = (("seed", repr(spec.seed)), ("trials", repr(spec.trials)))
    return ExperimentResult(kind=spec.kind, columns=("epsilon", "trial"),
                            rows=tuple(rows), meta=meta)


def run_minimal_time(spec: ExperimentSpec) -> ExperimentResult:
    """The fastest single-loop drive next to the uniform baselines.

    Row one drives every pi/2 pulse at the k=1 loop design and every pi
    pulse at its own k=1 design (both spectator loops close after a
    single turn); the baselines re-run the program at uniform Rabi 0.25
    and 0.1 for the duration comparison.
    """
    half_design = design_rabi_for_chain(spec.params.ising_constant,
                                        HALF_PI, k=1)
    pi_design = design_rabi_for_chain(spec.params.ising_constant, PI, k=1)
    runs = (
        ("min_time", half_design.rabi, pi_design.rabi),
        ("uniform_0.25", 0.25, 0.25),
        ("uniform_0.1", 0.1, 0.1),
    )
    table = build_transition_table(spec.params)
    rows = []
    for label, half, pi_ in runs:
        program = compile_shor4(spec.params, half, pi_)
        probs = _probabilities(table, program, spec.config)
        rows.append(ExperimentRow(
            variables=(half, pi_, program.total_duration),
            probabilities=probs, label=label,
        ))
    return ExperimentResult(
        kind="minimal_time",
        columns=("rabi_half_pi", "rabi_pi", "duration"),
        rows=tuple(rows),
    )


def _bits(p: int, width: int = 4) -> str:
    return format(p, f"0{width}b")


def _csv_lines(result: ExperimentResult):
    """Rows of the per-kind CSV schema, floats at round-trip precision.

    Schemas:

    * single_run: ``p,bits,probability`` (one row per basis state)
    * sweep_rabi: ``rabi,p1,p3,p5,p7,max_err_state,max_err_prob``
    * sweep_detuning: ``frequency_step,p1,p3,p5,p7,max_err_state,max_err_prob``
    * phase_noise / duration_noise: ``epsilon,trial,p0..p15`` with the
      trial-averaged row carrying trial = -1
    * minimal_time: ``program,rabi_half_pi,rabi_pi,duration,p1,p3,p5,p7,
      max_err_state,max_err_prob``
    """
    resonant_header = ",".join(f"p{p}" for p in RESONANT_STATES)
    if result.kind == "single_run":
        yield "p,bits,probability"
        for row in result.rows:
            for p, prob in enumerate(row.probabilities):
                yield f"{p},{_bits(p)},{float(prob)!r}"
    elif result.kind in ("sweep_rabi", "sweep_detuning"):
        yield f"{result.columns[0]},{resonant_header},max_err_state,max_err_prob"
        for row in result.rows:
            front = repr(float(row.variables[0]))
            mids = ",".join(repr(float(v)) for v in row.resonant)
            yield (f"{front},{mids},{row.max_error_state},"
                   f"{float(row.max_error_prob)!r}")
    elif result.kind in ("phase_noise", "duration_noise"):
        yield "epsilon,trial," + ",".join(f"p{p}" for p in range(16))
        for row in result.rows:
            eps, trial = row.variables
            probs = ",".join(repr(float(v)) for v in row.probabilities)
            yield f"{float(eps)!r},{int(trial)},{probs}"
    elif result.kind == "minimal_time":
        yield (f"program,rabi_half_pi,rabi_pi,duration,{resonant_header},"
               "max_err_state,max_err_prob")
        for row in result.rows:
            front = ",".join(repr(float(v)) for v in row.variables)
            mids = ",".join(repr(float(v)) for v in row.resonant)
            yield (f"{row.label},{front},{mids},"
                   f"{row.max_error_state},{float(row.max_error_prob)!r}")
    else:
        raise ValidationError(f"no CSV schema for kind {result.kind!r}")


def emit_csv(result: ExperimentResult, destination) -> None:
    """Write a result as CSV: ``# key value`` metadata, header, rows.

    ``destination`` is a path or an open text stream.  Column schemas
    per kind are documented on :func:`_csv_lines`; all floats use
    round-trip precision.  An empty result writes the header only.
    """
    def _write(stream):
        for key, value in result.meta:
            stream.write(f"# {key} {value}\n")
        for line in _csv_lines(result):
            stream.write(line + "\n")

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(destination, "w", encoding="ascii") as fh:
            _write(fh)
