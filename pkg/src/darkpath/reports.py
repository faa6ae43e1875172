"""Delimited and JSON output writers.

All numeric CSV fields use 17 significant digits so a repeated run can be
compared byte for byte.  JSON sidecars are written with sorted keys and a
trailing newline for the same reason.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import SimulationResult
from .pulse_design import PulseSchedule
from .transmon import DriveWaveform


def format_number(x) -> str:
    return f"{float(x):.17g}"


def _write_rows(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def write_schedule_csv(path: str | Path, schedule: PulseSchedule) -> Path:
    """Coupling waveforms, one column per qubit: ``t,g_1,...,g_N``."""
    n = schedule.spec.n_qubits
    header = ["t"] + [f"g_{j}" for j in range(1, n + 1)]
    rows = (
        [format_number(t)] + [format_number(g) for g in row]
        for t, row in zip(schedule.times, schedule.couplings)
    )
    return _write_rows(Path(path), header, rows)


def write_trajectory_csv(
    path: str | Path, result: SimulationResult, n_qubits: int
) -> Path:
    """Populations and running fidelity: ``t,pop_G,pop_1..pop_N,pop_a,fidelity``."""
    header = (
        ["t", "pop_G"]
        + [f"pop_{j}" for j in range(1, n_qubits + 1)]
        + ["pop_a", "fidelity"]
    )
    rows = (
        [format_number(t)]
        + [format_number(p) for p in pops]
        + [format_number(f)]
        for t, pops, f in zip(result.times, result.populations, result.fidelities)
    )
    return _write_rows(Path(path), header, rows)


def write_time_curve_csv(path: str | Path, amplitudes: np.ndarray, columns: dict) -> Path:
    """Minimal-duration curves: ``A`` plus one ``T_<label>`` column per protocol."""
    names = list(columns)
    header = ["A"] + [f"T_{name}" for name in names]
    table = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    rows = (
        [format_number(a)] + [format_number(v) for v in row]
        for a, row in zip(amplitudes, table)
    )
    return _write_rows(Path(path), header, rows)


def write_heatmap_csv(path: str | Path, grid) -> Path:
    """Fidelity matrix with axis values: first row x, first column y."""
    header = [grid.y_name + "\\" + grid.x_name] + [
        format_number(x) for x in grid.x_values
    ]
    rows = (
        [format_number(y)] + [format_number(v) for v in row]
        for y, row in zip(grid.y_values, grid.fidelities)
    )
    return _write_rows(Path(path), header, rows)


def write_sweep_csv(path: str | Path, rows: np.ndarray) -> Path:
    """Qubit-count sweep table: ``N,fidelity``."""
    body = (
        [str(int(round(n))), format_number(f)] for n, f in np.asarray(rows, dtype=float)
    )
    return _write_rows(Path(path), ["N", "fidelity"], body)


def write_waveform_csv(path: str | Path, waveform: DriveWaveform) -> Path:
    """Drive parameters over time: ``t_ns,eta_1..N,phase_flag_1..N``."""
    n = waveform.eta.shape[1]
    header = (
        ["t_ns"]
        + [f"eta_{j}" for j in range(1, n + 1)]
        + [f"phase_flag_{j}" for j in range(1, n + 1)]
    )
    rows = (
        [format_number(t)]
        + [format_number(e) for e in eta_row]
        + [str(int(flag)) for flag in flag_row]
        for t, eta_row, flag_row in zip(
            waveform.times, waveform.eta, waveform.phase_flags
        )
    )
    return _write_rows(Path(path), header, rows)
