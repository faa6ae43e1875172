"""Command-line interface with reproducible file outputs.

Every subcommand reads one optional config file, applies flag overrides,
computes, and writes CSV data plus a JSON sidecar holding the fully resolved
configuration, rendering PNG figures next to the delimited output.  Exit
codes: 0 on success, 1 when a numerical contract or feasibility check fails,
2 on a configuration problem.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import figures, optimize, pulse_design, reports, scans, transmon
from .config import ConfigError, RunConfig
from .dynamics import (
    NumericalContractError,
    propagate_lindblad,
    propagate_schrodinger,
)
from .model import ErrorModel
from .pulse_design import ProtocolKind, ProtocolSpec

_CURVE_LABELS = {"qst": "S", "pair_esg": "E", "all_esg": "prime"}


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    run = cfg.run
    overrides = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.model is not None:
        overrides["model"] = args.model
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if overrides:
        run = replace(run, **overrides)
    return replace(cfg, run=run)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _coupling_cap(cfg: RunConfig):
    """The coupling ceiling for the active mode, plus transmon params if any."""
    if cfg.run.mode == "transmon":
        params = cfg.transmon.to_params()
        return cfg.transmon.coupling_cap(params), params
    return cfg.protocol.g_max, None


def _template(cfg: RunConfig, g_max: float) -> ProtocolSpec:
    p = cfg.protocol
    try:
        return ProtocolSpec(
            kind=ProtocolKind(p.kind),
            n_qubits=p.n_qubits,
            source=p.source,
            target=p.target,
            amplitude=1.0,
            duration=1.0,
            g_max=g_max,
            theta=p.theta,
        )
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from exc


def _resolve_spec(cfg: RunConfig, g_max: float) -> ProtocolSpec:
    """Fill in amplitude (optimized) and duration (minimal time) when omitted."""
    template = _template(cfg, g_max)
    p = cfg.protocol
    amplitude = p.amplitude
    if amplitude is None:
        amplitude, _ = optimize.optimal_amplitude(template, g_max=g_max)
    duration = p.duration
    if duration is None:
        duration = optimize.dimensionless_peak(template, amplitude) / g_max
    try:
        return replace(template, amplitude=amplitude, duration=duration)
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from exc


def _error_model(cfg: RunConfig) -> ErrorModel | None:
    if cfg.error.epsilon == 0.0 and cfg.error.delta == 0.0:
        return None
    return ErrorModel(epsilon=cfg.error.epsilon, delta=cfg.error.delta)


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    payload = {"command": command, "config": cfg.resolved()}
    payload.update(extra)
    return payload


def _announce(paths) -> None:
    for path in paths:
        print(f"wrote {path}")


def cmd_design(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    g_max, _ = _coupling_cap(cfg)
    spec = _resolve_spec(cfg, g_max)
    n_samples = cfg.run.steps if cfg.run.steps is not None else 2001
    schedule = pulse_design.synthesize(spec, n_samples=n_samples)
    report = pulse_design.verify_pathway(spec)
    out = _out_dir(args)
    paths = [
        reports.write_schedule_csv(out / "schedule.csv", schedule),
        figures.save_schedule(schedule, out / "schedule.png"),
        reports.write_json(
            out / "design.json",
            _metadata(
                cfg,
                "design",
                spec=spec.to_dict(),
                peak_coupling=schedule.peak_coupling,
                pathway={
                    "max_norm_error": report.max_norm_error,
                    "max_energy_error": report.max_energy_error,
                    "max_residual": report.max_residual,
                    "n_grid": report.n_grid,
                },
            ),
        ),
    ]
    _announce(paths)
    print(
        f"designed {spec.kind.value}: A={spec.amplitude:.6g} T={spec.duration:.6g} "
        f"peak={schedule.peak_coupling:.6g}"
    )
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    g_max, _ = _coupling_cap(cfg)
    opt = cfg.optimize
    amplitudes = np.linspace(opt.a_min, opt.a_max, opt.count)
    columns = {}
    optima = {}
    for kind in opt.kinds:
        section = replace(cfg, protocol=replace(cfg.protocol, kind=kind))
        template = _template(section, g_max)
        curve = optimize.time_curve(template, amplitudes, g_max=g_max)
        label = _CURVE_LABELS[kind]
        columns[label] = curve.durations
        best_a, best_t = optimize.optimal_amplitude(template, g_max=g_max)
        optima[label] = (best_a, best_t)
    out = _out_dir(args)
    paths = [
        reports.write_time_curve_csv(out / "time_curve.csv", amplitudes, columns),
        figures.save_time_curves(amplitudes, columns, optima, out / "time_curve.png"),
        reports.write_json(
            out / "optima.json",
            _metadata(
                cfg,
                "optimize",
                optima={
                    kind: {
                        "amplitude": optima[_CURVE_LABELS[kind]][0],
                        "duration": optima[_CURVE_LABELS[kind]][1],
                    }
                    for kind in opt.kinds
                },
            ),
        ),
    ]
    _announce(paths)
    for kind in opt.kinds:
        best_a, best_t = optima[_CURVE_LABELS[kind]]
        print(f"{kind}: A*={best_a:.6g} T*={best_t:.6g}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    g_max, params = _coupling_cap(cfg)
    spec = _resolve_spec(cfg, g_max)
    error = _error_model(cfg)
    if cfg.run.mode == "transmon":
        result = transmon.simulate_physical(
            spec,
            params,
            which=cfg.run.model,
            steps=cfg.run.steps,
            error=error,
            saturate=cfg.transmon.saturate,
        )
    else:
        steps = cfg.run.steps if cfg.run.steps is not None else 4001
        noise = cfg.noise.to_noise_model()
        if noise.any_active:
            result = propagate_lindblad(spec, error, noise, steps=steps)
        else:
            result = propagate_schrodinger(spec, error, steps=steps)
    out = _out_dir(args)
    paths = [
        reports.write_trajectory_csv(out / "trajectory.csv", result, spec.n_qubits),
        figures.save_trajectory(result, spec.n_qubits, out / "trajectory.png"),
        reports.write_json(
            out / "summary.json",
            _metadata(
                cfg,
                "simulate",
                spec=spec.to_dict(),
                fidelity=result.fidelity,
                max_trace_deviation=result.max_trace_deviation,
                max_hermiticity_deviation=result.max_hermiticity_deviation,
                samples=len(result.times),
            ),
        ),
    ]
    _announce(paths)
    print(f"fidelity {result.fidelity:.6f}")
    return 0


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.run.mode != "dimensionless":
        raise ConfigError("scan supports only run.mode = dimensionless")
    sc = cfg.scan
    g_max = cfg.protocol.g_max
    template = _template(cfg, g_max)
    amplitudes = np.linspace(sc.a_min, sc.a_max, sc.a_count)
    x_lo, x_hi = sc.x_range(g_max)
    xs = np.linspace(x_lo, x_hi, sc.x_count)
    steps = cfg.run.steps if cfg.run.steps is not None else scans.DEFAULT_SCAN_STEPS
    if sc.kind == "x_error":
        grid = scans.scan_x_error(template, amplitudes, xs, steps=steps, n_jobs=cfg.run.jobs)
    elif sc.kind == "z_error":
        grid = scans.scan_z_error(template, amplitudes, xs, steps=steps, n_jobs=cfg.run.jobs)
    else:
        grid = scans.scan_decoherence(
            template, amplitudes, xs, mode=sc.mode, steps=steps, n_jobs=cfg.run.jobs
        )
    out = _out_dir(args)
    paths = [
        reports.write_heatmap_csv(out / "heatmap.csv", grid),
        figures.save_heatmap(grid, out / "heatmap.png"),
        reports.write_json(
            out / "scan.json",
            _metadata(
                cfg,
                "scan",
                grid=grid.metadata,
                x_values=[float(x) for x in grid.x_values],
                y_values=[float(y) for y in grid.y_values],
            ),
        ),
    ]
    _announce(paths)
    print(
        f"{sc.kind} scan {grid.fidelities.shape[0]}x{grid.fidelities.shape[1]}: "
        f"min {grid.fidelities.min():.6f} max {grid.fidelities.max():.6f}"
    )
    return 0


def cmd_sweep_n(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    params = cfg.transmon.to_params()
    target_coupling = None
    if cfg.transmon.target_coupling_mhz is not None:
        target_coupling = cfg.transmon.coupling_cap(params)
    n_values = list(range(cfg.sweep.n_min, cfg.sweep.n_max + 1))
    rows = scans.sweep_qubit_count(
        n_values,
        params,
        physical=cfg.sweep.physical,
        source=cfg.protocol.source,
        target=cfg.protocol.target,
        target_coupling=target_coupling,
        saturate=cfg.transmon.saturate,
        steps=cfg.run.steps,
        n_jobs=cfg.run.jobs,
    )
    out = _out_dir(args)
    paths = [
        reports.write_sweep_csv(out / "sweep.csv", rows),
        figures.save_sweep(rows, out / "sweep.png"),
        reports.write_json(
            out / "sweep.json",
            _metadata(
                cfg,
                "sweep-n",
                rows=[[int(n), float(f)] for n, f in rows],
            ),
        ),
    ]
    _announce(paths)
    print(f"swept N={n_values[0]}..{n_values[-1]}: last fidelity {rows[-1, 1]:.6f}")
    return 0


def cmd_transmon(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if args.mode is None and cfg.run.mode != "transmon":
        cfg = replace(cfg, run=replace(cfg.run, mode="transmon"))
    if cfg.run.mode != "transmon":
        raise ConfigError("the transmon command requires run.mode = transmon")
    params = cfg.transmon.to_params()
    cap = cfg.transmon.coupling_cap(params)
    spec = _resolve_spec(cfg, cap)
    waveform = transmon.design_physical(
        spec, params, saturate=cfg.transmon.saturate
    )
    result = transmon.simulate_physical(
        spec,
        params,
        which=cfg.run.model,
        steps=cfg.run.steps,
        error=_error_model(cfg),
        saturate=cfg.transmon.saturate,
    )
    out = _out_dir(args)
    paths = [
        reports.write_waveform_csv(out / "waveform.csv", waveform),
        figures.save_waveform(waveform, out / "waveform.png"),
        reports.write_trajectory_csv(out / "trajectory.csv", result, spec.n_qubits),
        figures.save_trajectory(result, spec.n_qubits, out / "trajectory.png"),
        reports.write_json(
            out / "summary.json",
            _metadata(
                cfg,
                "transmon",
                spec=spec.to_dict(),
                fidelity=result.fidelity,
                requested_peak=waveform.requested_peak,
                clip_fraction=waveform.clip_fraction,
                feasible_coupling=params.feasible_coupling,
                max_trace_deviation=result.max_trace_deviation,
                samples=len(result.times),
            ),
        ),
    ]
    _announce(paths)
    print(
        f"transmon {cfg.run.model} model: fidelity {result.fidelity:.6f} "
        f"(clip fraction {waveform.clip_fraction:.4g})"
    )
    return 0


_COMMANDS = {
    "design": (cmd_design, "synthesize a coupling schedule and feasibility report"),
    "optimize": (cmd_optimize, "trace duration-versus-amplitude curves and optima"),
    "simulate": (cmd_simulate, "propagate a protocol and record the trajectory"),
    "scan": (cmd_scan, "map fidelity over an error or noise grid"),
    "sweep-n": (cmd_sweep_n, "fidelity as a function of the qubit count"),
    "transmon": (cmd_transmon, "design drive waveforms and run the physical model"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkpath",
        description="Pulse design and simulation for bus-mediated dark-pathway protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", default=None, help="JSON or YAML config file")
        sp.add_argument(
            "--out", default="darkpath-out", help="output directory (created if missing)"
        )
        sp.add_argument("--steps", type=int, default=None, help="integrator steps")
        sp.add_argument(
            "--mode",
            choices=["dimensionless", "transmon"],
            default=None,
            help="unit system and model family",
        )
        sp.add_argument(
            "--model",
            choices=["effective", "full"],
            default=None,
            help="transmon model flavor",
        )
        sp.add_argument("--jobs", type=int, default=None, help="parallel workers")
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalContractError, transmon.InfeasibleDriveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
