"""Command-line front end for runs, sweeps, noise studies and reports.

Every subcommand writes a delimited report (CSV to --out, or stdout)
and, with --plot, renders a PNG figure next to the CSV.  Exit codes:
0 success, 1 invalid parameters or a failed program self-check,
2 integrator accuracy failure, 3 period/factor extraction failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .chain import ChainParams, build_transition_table
from .dynamics import IntegratorConfig, evolve_sequence, ground_state
from .errors import (CompilationError, ExtractionError, IntegrationError,
                     ValidationError)
from .experiments import (MEAN_TRIAL, RESONANT_STATES, ExperimentResult,
                          ExperimentRow, ExperimentSpec, emit_csv,
                          run_minimal_time, run_noise_study, run_single,
                          run_trace, sweep_detuning, sweep_rabi)
from .oracles import design_rabi_for_chain
from .pulses import HALF_PI, PI, load_sequence
from .shor import SHOR4, extract_factor, extract_period, measure

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    chain = common.add_argument_group("chain")
    chain.add_argument("--delta-omega", type=float, default=10.0,
                       help="frequency step between adjacent spins")
    chain.add_argument("--ising", type=float, default=1.0,
                       help="nearest-neighbour Ising constant J")
    chain.add_argument("--base-freq", type=float, default=100.0,
                       help="frequency of spin 0")
    drive = common.add_argument_group("drive")
    drive.add_argument("--rabi", type=float, default=0.1,
                       help="uniform Rabi frequency")
    drive.add_argument("--rabi-half-pi", type=float, default=None,
                       help="Rabi frequency for pi/2 pulses (overrides --rabi)")
    drive.add_argument("--rabi-pi", type=float, default=None,
                       help="Rabi frequency for pi pulses (overrides --rabi)")
    drive.add_argument("--steps-per-period", type=int, default=128,
                       help="integrator steps per fastest phase period")
    noise = common.add_argument_group("noise")
    noise.add_argument("--seed", type=int, default=11,
                       help="base seed; trial t draws from seed + t")
    noise.add_argument("--epsilon", type=float, action="append",
                       default=None, metavar="EPS",
                       help="noise half-width; repeat for several values")
    noise.add_argument("--trials", type=int, default=20,
                       help="number of noise trials per epsilon")
    output = common.add_argument_group("output")
    output.add_argument("--out", type=Path, default=None,
                        help="report path (default: stdout)")
    output.add_argument("--format", choices=("csv", "text"), default="csv",
                        help="report format")
    output.add_argument("--plot", action="store_true",
                        help="also render a PNG next to --out")

    parser = argparse.ArgumentParser(
        prog="spinshor",
        description="Pulse-level order finding on a four-spin Ising chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common],
                         help="one run; report the output distribution")
    run.add_argument("--sequence-file", type=Path, default=None,
                     help="play this pulse table instead of compiling")

    sub.add_parser("sweep-rabi", parents=[common],
                   help="re-run over a grid of uniform Rabi frequencies")
    sub.add_parser("sweep-detuning", parents=[common],
                   help="re-run over a grid of chain frequency steps")

    trace = sub.add_parser("trace", parents=[common],
                           help="time trace of one state's population")
    trace.add_argument("--state", type=int, default=3,
                       help="basis state to report")

    sub.add_parser("noise-phase", parents=[common],
                   help="random carrier-phase perturbation study")
    sub.add_parser("noise-duration", parents=[common],
                   help="random pulse-duration perturbation study")
    sub.add_parser("minimal-time", parents=[common],
                   help="fastest single-loop drive vs uniform baselines")
    sub.add_parser("design", parents=[common],
                   help="loop-closing Rabi frequencies for k = 1..5")

    factor = sub.add_parser("factor", parents=[common],
                            help="full pipeline: distribution, period, factor")
    factor.add_argument("--sequence-file", type=Path, default=None,
                        help="play this pulse table instead of compiling")
    return parser


def _spec(args, kind: str) -> ExperimentSpec:
    params = ChainParams(
        base_frequency=args.base_freq,
        frequency_step=args.delta_omega,
        ising_constant=args.ising,
    )
    epsilons = None if args.epsilon is None else tuple(args.epsilon)
    return ExperimentSpec(
        kind=kind,
        params=params,
        rabi=args.rabi,
        rabi_half_pi=args.rabi_half_pi,
        rabi_pi=args.rabi_pi,
        epsilons=epsilons,
        seed=args.seed,
        trials=args.trials,
        config=IntegratorConfig(steps_per_period=args.steps_per_period),
    )


def _plot_path(args) -> Path:
    return args.out.with_suffix(".png")


def _write_report(args, result: ExperimentResult, text_renderer) -> None:
    if args.format == "text":
        lines = text_renderer(result)
        payload = "\n".join(lines) + "\n"
        if args.out is None:
            sys.stdout.write(payload)
        else:
            args.out.write_text(payload, encoding="ascii")
    elif args.out is None:
        emit_csv(result, sys.stdout)
    else:
        emit_csv(result, args.out)


def _text_single(result: ExperimentResult):
    row = result.rows[0]
    yield "p  bits  probability"
    for p, prob in enumerate(row.probabilities):
        yield f"{p:<2d} {format(p, '04b')}  {prob:.6f}"
    yield f"resonant sum {float(row.resonant.sum()):.6f}"
    yield (f"worst error state |{row.max_error_state}> "
           f"at {row.max_error_prob:.3e}")


def _text_sweep(result: ExperimentResult):
    name = result.columns[0]
    yield f"{name:>14s}    p1      p3      p5      p7    worst error"
    for row in result.rows:
        probs = "  ".join(f"{v:.4f}" for v in row.resonant)
        yield (f"{row.variables[0]:>14.5g}  {probs}  "
               f"|{row.max_error_state}> {row.max_error_prob:.3e}")


def _text_noise(result: ExperimentResult):
    yield "epsilon  mean total error  worst mean error state"
    for row in result.rows:
        eps, trial = row.variables
        if trial != MEAN_TRIAL:
            continue
        yield (f"{eps:<8g} {row.total_error:<17.4e} "
               f"|{row.max_error_state}> {row.max_error_prob:.3e}")


def _text_minimal(result: ExperimentResult):
    for row in result.rows:
        half, pi_, duration = row.variables
        yield (f"{row.label}: rabi_half_pi {half:.5f} rabi_pi {pi_:.5f} "
               f"duration {duration:.2f} worst error |{row.max_error_state}> "
               f"{row.max_error_prob:.3e}")


def _cmd_run(args) -> int:
    if args.sequence_file is not None:
        params = ChainParams(base_frequency=args.base_freq,
                             frequency_step=args.delta_omega,
                             ising_constant=args.ising)
        sequence = load_sequence(args.sequence_file)
        config = IntegratorConfig(steps_per_period=args.steps_per_period)
        state = evolve_sequence(build_transition_table(params), sequence,
                                ground_state(params), config)
        row = ExperimentRow(variables=(), probabilities=np.abs(state) ** 2)
        result = ExperimentResult(
            kind="single_run", columns=(), rows=(row,),
            meta=(("sequence_file", str(args.sequence_file)),
                  ("total_duration", repr(sequence.total_duration))),
        )
    else:
        result = run_single(_spec(args, "single_run"))
    _write_report(args, result, _text_single)
    if args.plot:
        from .plotting import plot_distribution
        plot_distribution(result.rows[0].probabilities, _plot_path(args))
    return 0


def _cmd_sweep(args, kind: str) -> int:
    runner = sweep_rabi if kind == "sweep_rabi" else sweep_detuning
    result = runner(_spec(args, kind))
    _write_report(args, result, _text_sweep)
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(result, _plot_path(args))
    return 0


def _cmd_trace(args) -> int:
    trace = run_trace(_spec(args, "trace"), traced_state=args.state)
    if args.format == "text":
        lines = [
            f"samples {len(trace.times)} from t=0 to t={trace.times[-1]:.2f}",
            "markers " + " ".join(f"{m:.3f}" for m in trace.markers),
            f"final |c_{args.state}|^2 = {trace.probability(args.state)[-1]:.6f}",
        ]
        payload = "\n".join(lines) + "\n"
        if args.out is None:
            sys.stdout.write(payload)
        else:
            args.out.write_text(payload, encoding="ascii")
    elif args.out is None:
        trace.to_csv(sys.stdout, states=[args.state])
    else:
        trace.to_csv(args.out, states=[args.state])
    if args.plot:
        from .plotting import plot_trace
        plot_trace(trace, _plot_path(args), state=args.state)
    return 0


def _cmd_noise(args, kind: str) -> int:
    result = run_noise_study(_spec(args, kind))
    _write_report(args, result, _text_noise)
    if args.plot:
        from .plotting import plot_noise
        plot_noise(result, _plot_path(args))
    return 0


def _cmd_minimal(args) -> int:
    result = run_minimal_time(_spec(args, "minimal_time"))
    _write_report(args, result, _text_minimal)
    if args.plot:
        from .plotting import plot_minimal_time
        plot_minimal_time(result, _plot_path(args))
    return 0


def _cmd_design(args) -> int:
    rows = [(kind, k, design_rabi_for_chain(args.ising, kind, k))
            for kind in (HALF_PI, PI) for k in range(1, 6)]
    if args.format == "text":
        lines = ["kind     k  rabi      duration"]
        lines += [f"{kind:<8s} {k}  {d.rabi:.5f}  {d.duration:.4f}"
                  for kind, k, d in rows]
    else:
        lines = ["kind,k,rabi,duration"]
        lines += [f"{kind},{k},{d.rabi!r},{d.duration!r}"
                  for kind, k, d in rows]
    payload = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(payload)
    else:
        args.out.write_text(payload, encoding="ascii")
    return 0


def _cmd_factor(args) -> int:
    params = ChainParams(base_frequency=args.base_freq,
                         frequency_step=args.delta_omega,
                         ising_constant=args.ising)
    config = IntegratorConfig(steps_per_period=args.steps_per_period)
    if args.sequence_file is not None:
        sequence = load_sequence(args.sequence_file)
    else:
        from .shor import compile_shor4
        half = args.rabi if args.rabi_half_pi is None else args.rabi_half_pi
        pi_ = args.rabi if args.rabi_pi is None else args.rabi_pi
        sequence = compile_shor4(params, half, pi_)
    state = evolve_sequence(build_transition_table(params), sequence,
                            ground_state(params), config)
    distribution = measure(state)
    period = extract_period(distribution.x_probabilities)
    factor = extract_factor(period)
    if args.format == "text":
        lines = [f"period {period}", f"factor {factor} of {SHOR4.modulus}"]
        lines += [f"x={x} probability {prob:.6f}"
                  for x, prob in enumerate(distribution.x_probabilities)]
    else:
        lines = [f"# period {period}", f"# factor {factor}",
                 "x,probability"]
        lines += [f"{x},{float(prob)!r}"
                  for x, prob in enumerate(distribution.x_probabilities)]
    payload = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(payload)
    else:
        args.out.write_text(payload, encoding="ascii")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.plot and args.out is None:
            raise ValidationError("--plot needs --out to name the figure")
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep-rabi":
            return _cmd_sweep(args, "sweep_rabi")
        if args.command == "sweep-detuning":
            return _cmd_sweep(args, "sweep_detuning")
        if args.command == "trace":
            return _cmd_trace(args)
        if args.command == "noise-phase":
            return _cmd_noise(args, "phase_noise")
        if args.command == "noise-duration":
            return _cmd_noise(args, "duration_noise")
        if args.command == "minimal-time":
            return _cmd_minimal(args)
        if args.command == "design":
            return _cmd_design(args)
        if args.command == "factor":
            return _cmd_factor(args)
        raise ValidationError(f"unhandled command {args.command!r}")
    except (ValidationError, CompilationError) as exc:
        print(f"spinshor: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"spinshor: {exc}", file=sys.stderr)
        return 2
    except ExtractionError as exc:
        print(f"spinshor: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
