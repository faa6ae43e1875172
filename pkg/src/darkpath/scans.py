"""Robustness scans over control errors and noise, plus qubit-count sweeps.

Every scan shares the same recipe: for each amplitude ``A`` on the grid the
protocol runs at its minimal duration ``T = C(A) / g_max`` (the peak-coupling
functional of :mod:`darkpath.optimize`), with one perturbation axis swept per
scan.  Grid cells are independent, so rows can be evaluated in parallel; the
assembled matrix is deterministic regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from . import optimize, pulse_design, transmon
from .dynamics import propagate_lindblad, propagate_schrodinger
from .model import ErrorModel, NoiseModel
from .pulse_design import ProtocolSpec

DEFAULT_SCAN_STEPS = 2001


@dataclass
class ScanGrid:
    """A 2-D fidelity map with named axes.

    ``fidelities[i, j]`` is the fidelity at ``y_values[i]`` and
    ``x_values[j]``.  The y axis is always the pulse amplitude; the x axis is
    whichever perturbation the scan sweeps.
    """

    x_name: str
    x_values: np.ndarray
    y_name: str
    y_values: np.ndarray
    fidelities: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x_values = np.asarray(self.x_values, dtype=float)
        self.y_values = np.asarray(self.y_values, dtype=float)
        self.fidelities = np.asarray(self.fidelities, dtype=float)
        expected = (self.y_values.size, self.x_values.size)
        if self.fidelities.shape != expected:
            raise ValueError(
                f"fidelity matrix shape {self.fidelities.shape} does not match "
                f"axes {expected}"
            )
        low, high = self.fidelities.min(), self.fidelities.max()
        if low < -1e-9 or high > 1.0 + 1e-9:
            raise ValueError(f"fidelities outside [0, 1]: min {low}, max {high}")
        np.clip(self.fidelities, 0.0, 1.0, out=self.fidelities)

    def column(self, x_value: float) -> np.ndarray:
        """Fidelity column at the grid x closest to ``x_value``."""
        j = int(np.argmin(np.abs(self.x_values - x_value)))
        return self.fidelities[:, j]


def _validated_grid(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} grid contains non-finite values")
    return arr


def _minimal_durations(template: ProtocolSpec, amplitudes: np.ndarray) -> np.ndarray:
    peaks = np.array(
        [optimize.dimensionless_peak(template, float(a)) for a in amplitudes]
    )
    return peaks / template.g_max


def _closed_row(
    template: ProtocolSpec,
    amplitude: float,
    duration: float,
    x_values: np.ndarray,
    make_error,
    steps: int,
) -> np.ndarray:
    spec = replace(template, amplitude=amplitude, duration=duration)
    row = np.empty(x_values.size)
    for j, x in enumerate(x_values):
        result = propagate_schrodinger(spec, make_error(float(x)), steps=steps)
        row[j] = result.fidelity
    return row


def _open_row(
    template: ProtocolSpec,
    amplitude: float,
    duration: float,
    x_values: np.ndarray,
    make_noise,
    steps: int,
) -> np.ndarray:
    spec = replace(template, amplitude=amplitude, duration=duration)
    row = np.empty(x_values.size)
    for j, x in enumerate(x_values):
        result = propagate_lindblad(spec, noise=make_noise(float(x)), steps=steps)
        row[j] = result.fidelity
    return row


def _assemble(
    template: ProtocolSpec,
    amplitudes: np.ndarray,
    x_values: np.ndarray,
    row_fn,
    make_perturbation,
    steps: int,
    n_jobs: int,
) -> np.ndarray:
    durations = _minimal_durations(template, amplitudes)
    rows = Parallel(n_jobs=n_jobs)(
        delayed(row_fn)(
            template, float(a), float(t), x_values, make_perturbation, steps
        )
        for a, t in zip(amplitudes, durations)
    )
    return np.vstack(rows)


def _base_metadata(template: ProtocolSpec, steps: int, **extra) -> dict:
    meta = {"protocol": template.to_dict(), "steps": steps}
    meta["protocol"].pop("amplitude", None)
    meta["protocol"].pop("duration", None)
    meta.update(extra)
    return meta


def scan_x_error(
    template: ProtocolSpec,
    amplitudes: Sequence[float],
    epsilons: Sequence[float],
    steps: int = DEFAULT_SCAN_STEPS,
    n_jobs: int = 1,
) -> ScanGrid:
    """Noiseless fidelity under a relative amplitude miscalibration.

    Every coupling is rescaled by ``1 + epsilon``; by linearity of the star
    Hamiltonian this is identical to feeding the rescaled schedule itself.
    """
    amplitudes = _validated_grid(amplitudes, "amplitude")
    epsilons = _validated_grid(epsilons, "epsilon")
    fid = _assemble(
        template,
        amplitudes,
        epsilons,
        _closed_row,
        lambda x: ErrorModel(epsilon=x),
        steps,
        n_jobs,
    )
    return ScanGrid(
        "epsilon",
        epsilons,
        "amplitude",
        amplitudes,
        fid,
        _base_metadata(template, steps, scan="x_error"),
    )


def scan_z_error(
    template: ProtocolSpec,
    amplitudes: Sequence[float],
    deltas: Sequence[float],
    steps: int = DEFAULT_SCAN_STEPS,
    n_jobs: int = 1,
) -> ScanGrid:
    """Noiseless fidelity under a static shift of every qubit level.

    ``deltas`` are angular frequencies in the same units as the couplings; a
    shift ``delta`` adds the diagonal qubit term of :class:`ErrorModel` to the
    Hamiltonian.
    """
    amplitudes = _validated_grid(amplitudes, "amplitude")
    deltas = _validated_grid(deltas, "delta")
    fid = _assemble(
        template,
        amplitudes,
        deltas,
        _closed_row,
        lambda x: ErrorModel(delta=x),
        steps,
        n_jobs,
    )
    return ScanGrid(
        "delta",
        deltas,
        "amplitude",
        amplitudes,
        fid,
        _base_metadata(template, steps, scan="z_error"),
    )


def scan_decoherence(
    template: ProtocolSpec,
    amplitudes: Sequence[float],
    gammas: Sequence[float],
    mode: str = "uniform",
    steps: int = DEFAULT_SCAN_STEPS,
    n_jobs: int = 1,
) -> ScanGrid:
    """Open-system fidelity versus decoherence rate.

    ``mode="uniform"`` applies the swept rate to decay and dephasing on every
    qubit and on the bus alike.  ``mode="bus-fixed"`` sweeps only the qubit
    rates while pinning both bus rates at ``g_max / 1000``, isolating how much
    of the loss the bus itself contributes.
    """
    if mode not in ("uniform", "bus-fixed"):
        raise ValueError(f"mode must be 'uniform' or 'bus-fixed', got {mode!r}")
    amplitudes = _validated_grid(amplitudes, "amplitude")
    gammas = _validated_grid(gammas, "gamma")
    if gammas.min() < 0.0:
        raise ValueError("decoherence rates must be >= 0")

    if mode == "uniform":
        make_noise = NoiseModel.uniform
    else:
        bus_rate = template.g_max / 1000.0

        def make_noise(rate: float) -> NoiseModel:
            return NoiseModel(
                decay_qubit=rate,
                dephase_qubit=rate,
                decay_bus=bus_rate,
                dephase_bus=bus_rate,
            )

    fid = _assemble(
        template, amplitudes, gammas, _open_row, make_noise, steps, n_jobs
    )
    return ScanGrid(
        "gamma",
        gammas,
        "amplitude",
        amplitudes,
        fid,
        _base_metadata(template, steps, scan="decoherence", mode=mode),
    )


def _sweep_point(
    n_qubits: int,
    params: transmon.TransmonParams,
    physical: bool,
    source: int,
    target: int,
    cap: float,
    saturate: bool,
    steps: int | None,
    bracket: tuple[float, float],
) -> float:
    template = ProtocolSpec(
        kind=pulse_design.ProtocolKind.QST,
        n_qubits=n_qubits,
        source=source,
        target=target,
        amplitude=1.0,
        duration=1.0,
    )
    best, _ = optimize.optimal_amplitude(template, bracket=bracket)
    duration = optimize.dimensionless_peak(template, best) / cap
    spec = replace(template, amplitude=best, duration=duration)
    which = "full" if physical else "effective"
    result = transmon.simulate_physical(
        spec, params, which, steps=steps, saturate=saturate
    )
    return result.fidelity


def sweep_qubit_count(
    n_values: Sequence[int],
    params: transmon.TransmonParams | None = None,
    physical: bool = True,
    *,
    source: int = 1,
    target: int = 3,
    target_coupling: float | None = None,
    saturate: bool = False,
    steps: int | None = None,
    bracket: tuple[float, float] = (0.05, 2.0),
    n_jobs: int = 1,
) -> np.ndarray:
    """State-transfer fidelity as the register grows.

    For each qubit count the transfer amplitude is re-optimized for minimal
    time, the duration is set by the coupling cap, and the protocol runs on
    the transmon layer (``physical=True`` drives the modulated full model,
    ``physical=False`` the effective star model with the same noise).  The
    cap defaults to the drive's invertible maximum; pass ``target_coupling``
    (with ``saturate=True`` if it exceeds that maximum) to pin it elsewhere.

    Returns rows of ``(N, fidelity)``.
    """
    n_values = [int(n) for n in n_values]
    if not n_values:
        raise ValueError("n_values must be non-empty")
    if min(n_values) < 3:
        raise ValueError("qubit-count sweep needs N >= 3 (source, target, idle)")
    if params is None:
        params = transmon.TransmonParams.from_mhz()
    cap = params.feasible_coupling if target_coupling is None else float(target_coupling)
    if cap <= 0.0:
        raise ValueError("target_coupling must be > 0")
    fidelities = Parallel(n_jobs=n_jobs)(
        delayed(_sweep_point)(
            n, params, physical, source, target, cap, saturate, steps, bracket
        )
        for n in n_values
    )
    return np.column_stack([np.array(n_values, dtype=float), np.array(fidelities)])
