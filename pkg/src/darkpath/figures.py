"""Matplotlib renderings of the CSV outputs, written straight to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import SimulationResult
from .pulse_design import PulseSchedule
from .transmon import DriveWaveform

_PNG_METADATA = {"Software": "darkpath"}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def save_schedule(schedule: PulseSchedule, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    for j in range(schedule.couplings.shape[1]):
        ax.plot(schedule.times, schedule.couplings[:, j], label=f"$g_{{{j + 1}}}$")
    ax.set_xlabel("t")
    ax.set_ylabel("coupling")
    ax.set_title(f"{schedule.spec.kind.value} couplings (A={schedule.spec.amplitude:g})")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def save_trajectory(result: SimulationResult, n_qubits: int, path: str | Path) -> Path:
    labels = ["G"] + [str(j) for j in range(1, n_qubits + 1)] + ["a"]
    fig, (ax_pop, ax_fid) = plt.subplots(
        2, 1, figsize=(6.0, 5.0), sharex=True, constrained_layout=True
    )
    for i, label in enumerate(labels):
        ax_pop.plot(result.times, result.populations[:, i], label=label)
    ax_pop.set_ylabel("population")
    ax_pop.legend(loc="center right", fontsize=8, ncol=2)
    ax_fid.plot(result.times, result.fidelities, color="tab:red")
    ax_fid.set_xlabel("t")
    ax_fid.set_ylabel("fidelity")
    ax_fid.set_ylim(-0.02, 1.02)
    return _save(fig, path)


def save_time_curves(
    amplitudes: np.ndarray, columns: dict, optima: dict, path: str | Path
) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    for name, durations in columns.items():
        ax.plot(amplitudes, durations, label=name)
        best = optima.get(name)
        if best is not None:
            ax.plot([best[0]], [best[1]], "o", color=ax.lines[-1].get_color())
    ax.set_xlabel("A")
    ax.set_ylabel("minimal duration")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def save_heatmap(grid, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.4, 4.2), constrained_layout=True)
    mesh = ax.pcolormesh(
        grid.x_values, grid.y_values, grid.fidelities, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="fidelity")
    ax.set_xlabel(grid.x_name)
    ax.set_ylabel(grid.y_name)
    mode = grid.metadata.get("mode")
    title = grid.metadata.get("scan", "scan")
    if mode:
        title = f"{title} ({mode})"
    ax.set_title(title)
    return _save(fig, path)


def save_sweep(rows: np.ndarray, path: str | Path) -> Path:
    rows = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(5.4, 3.6), constrained_layout=True)
    ax.plot(rows[:, 0], rows[:, 1], "o-")
    ax.set_xlabel("N")
    ax.set_ylabel("fidelity")
    return _save(fig, path)


def save_waveform(waveform: DriveWaveform, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    n = waveform.eta.shape[1]
    for j in range(n):
        sign = np.where(waveform.phase_flags[:, j], -1.0, 1.0)
        ax.plot(waveform.times, sign * waveform.eta[:, j], label=f"qubit {j + 1}")
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("signed modulation index")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)
