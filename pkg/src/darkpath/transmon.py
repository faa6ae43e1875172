"""Superconducting-circuit layer: parametric drives realizing the couplings.

A register of transmons star-coupled to a readout resonator at bare strength
``Omega_j`` can emulate slow coupling waveforms ``g_j(t)`` by frequency
modulation: a longitudinal drive with phase ``F_j(t) = eta_j(t) sin(nu t)``
produces, on resonance ``nu = Delta_j`` (qubit-resonator detuning), the
first-sideband coupling ``Omega_j J1(eta_j)``.  This module inverts that
relation to design the ``eta_j(t)`` waveforms and integrates the un-averaged
oscillating Hamiltonian to quantify what the sideband picture hides.

All frequencies are angular and carried in rad/ns; laboratory figures enter
through :meth:`TransmonParams.from_mhz`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1, jvp

from . import model, pulse_design
from .dynamics import (
    SimulationResult,
    propagate_density_half_grid,
    propagate_state_half_grid,
)

TWO_PI = 2.0 * math.pi

# First maximum of J1; the inversion domain ends here.
ETA_MAX = 1.8411837813406593
BESSEL_CAP = float(j1(ETA_MAX))

# Resolution contract for the oscillating Hamiltonian.
MIN_STEPS_PER_PERIOD = 200


class InfeasibleDriveError(ValueError):
    """Requested coupling exceeds the invertible drive range."""


@dataclass(frozen=True)
class TransmonParams:
    """Hardware constants of the modulated transmon register.

    ``omega`` is the bare transmon-resonator coupling, ``detuning`` the
    qubit-resonator frequency difference, and ``modulation`` the longitudinal
    drive frequency (defaults to the detuning, the resonant case this package
    designs for).  ``noise`` carries the decoherence rates.  Everything is
    angular, in rad/ns.
    """

    omega: float = TWO_PI * 17.0e-3
    detuning: float = TWO_PI * 0.8
    modulation: float | None = None
    noise: model.NoiseModel = field(
        default_factory=lambda: model.NoiseModel.uniform(TWO_PI * 5.0e-6)
    )

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (math.isfinite(self.detuning) and self.detuning > 0.0):
            raise ValueError(f"detuning must be positive, got {self.detuning}")
        if self.modulation is None:
            object.__setattr__(self, "modulation", self.detuning)
        if not (math.isfinite(self.modulation) and self.modulation > 0.0):
            raise ValueError(f"modulation must be positive, got {self.modulation}")

    @classmethod
    def from_mhz(
        cls,
        omega_mhz: float = 17.0,
        detuning_mhz: float = 800.0,
        modulation_mhz: float | None = None,
        gamma_khz: float = 5.0,
    ) -> "TransmonParams":
        """Build from laboratory figures (plain MHz/kHz, factors of 2 pi added)."""
        return cls(
            omega=TWO_PI * omega_mhz * 1.0e-3,
            detuning=TWO_PI * detuning_mhz * 1.0e-3,
            modulation=None if modulation_mhz is None else TWO_PI * modulation_mhz * 1.0e-3,
            noise=model.NoiseModel.uniform(TWO_PI * gamma_khz * 1.0e-6),
        )

    @property
    def resonant(self) -> bool:
        return abs(self.modulation - self.detuning) <= 1.0e-12 * self.detuning

    @property
    def feasible_coupling(self) -> float:
        """Largest effective coupling the drive can request, ``J1max * omega``."""
        return BESSEL_CAP * self.omega


@dataclass
class DriveWaveform:
    """Per-qubit modulation amplitudes with sign bookkeeping.

    ``eta`` has one column per qubit on the ``times`` grid.  ``phase_flags``
    marks samples where the designed coupling was negative; those segments
    carry an extra pi in the drive phase, flipping the sideband sign.
    ``clip_fraction`` is the fraction of (time, qubit) samples that hit the
    inversion ceiling when saturation was allowed.
    """

    times: np.ndarray
    eta: np.ndarray
    phase_flags: np.ndarray
    params: TransmonParams
    requested_peak: float
    clip_fraction: float = 0.0

    def coupling_rows(self) -> np.ndarray:
        """Achieved effective couplings ``sign * omega * J1(eta)``, rad/ns."""
        sign = np.where(self.phase_flags, -1.0, 1.0)
        return sign * self.params.omega * j1(self.eta)


def _as_ratio(g, omega: float) -> np.ndarray:
    ratio = np.asarray(g, dtype=float) / omega
    if not np.all(np.isfinite(ratio)):
        raise ValueError("couplings must be finite")
    return ratio


def invert_bessel(g, omega: float):
    """Modulation amplitude eta in [0, ETA_MAX] with ``omega * J1(eta) = g``.

    Accepts scalars or arrays; ``g`` must lie in ``[0, BESSEL_CAP * omega]``.
    Newton iteration on the monotone branch seeded from a dense table; the
    round trip ``omega * J1(invert_bessel(g, omega))`` reproduces ``g`` to
    better than 1e-9 relative over the feasible range.
    """
    ratio = _as_ratio(g, omega)
    scalar = ratio.ndim == 0
    ratio = np.atleast_1d(ratio)
    if np.any(ratio < -1.0e-15) or np.any(ratio > BESSEL_CAP * (1.0 + 1.0e-12)):
        bad = float(ratio[np.argmax(np.abs(ratio - BESSEL_CAP / 2.0))])
        raise InfeasibleDriveError(
            f"coupling ratio {bad:.6f} outside invertible range "
            f"[0, {BESSEL_CAP:.6f}]"
        )
    ratio = np.clip(ratio, 0.0, BESSEL_CAP)
    eta = np.interp(ratio, _INV_TABLE_J, _INV_TABLE_ETA)
    for _ in range(4):
        resid = j1(eta) - ratio
        slope = jvp(1, eta)
        step = np.where(slope > 1.0e-12, resid / np.where(slope > 1.0e-12, slope, 1.0), 0.0)
        eta = np.clip(eta - step, 0.0, ETA_MAX)
    return float(eta[0]) if scalar else eta


_INV_TABLE_ETA = np.linspace(0.0, ETA_MAX, 4097)
_INV_TABLE_J = j1(_INV_TABLE_ETA)


def _check_resonant(params: TransmonParams):
    if not params.resonant:
        raise ValueError(
            "waveform design assumes the resonant condition modulation == detuning; "
            f"got modulation={params.modulation}, detuning={params.detuning}"
        )


def _eta_and_flags(
    rows: np.ndarray, params: TransmonParams, saturate: bool
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Invert requested couplings to (eta, phase flags, peak, clip fraction)."""
    magnitude = np.abs(rows)
    peak = float(magnitude.max())
    cap = params.feasible_coupling
    over = magnitude > cap
    if peak > cap * (1.0 + 1.0e-9):
        if not saturate:
            k, j = np.unravel_index(int(magnitude.argmax()), magnitude.shape)
            raise InfeasibleDriveError(
                f"requested |coupling| = {peak:.6g} rad/ns at qubit {j + 1}, "
                f"sample {k}, above the invertible maximum {cap:.6g} rad/ns "
                f"(= {BESSEL_CAP:.6f} * omega); lower the coupling or pass "
                "saturate=True to clip at the ceiling"
            )
        magnitude = np.minimum(magnitude, cap)
    clip_fraction = float(over.mean()) if saturate else 0.0
    eta = invert_bessel(magnitude.ravel(), params.omega).reshape(magnitude.shape)
    flags = rows < 0.0
    return eta, flags, peak, clip_fraction


def design_physical(
    spec: pulse_design.ProtocolSpec,
    params: TransmonParams,
    n_samples: int = 2001,
    saturate: bool = False,
) -> DriveWaveform:
    """Design the per-qubit eta_j(t) waveforms realizing a protocol.

    ``spec.duration`` is in ns.  Raises :class:`InfeasibleDriveError` when the
    schedule asks for more coupling than ``J1max * omega``; with
    ``saturate=True`` the drive is clipped at the ceiling instead and the
    clipped fraction is recorded on the waveform.
    """
    _check_resonant(params)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    times = np.linspace(0.0, spec.duration, n_samples)
    rows = pulse_design.coupling_matrix(spec, times)
    eta, flags, peak, clip_fraction = _eta_and_flags(rows, params, saturate)
    return DriveWaveform(
        times=times,
        eta=eta,
        phase_flags=flags,
        params=params,
        requested_peak=peak,
        clip_fraction=clip_fraction,
    )


def full_hamiltonian(t: float, params: TransmonParams, waveform: DriveWaveform) -> np.ndarray:
    """Oscillating-frame Hamiltonian at time ``t`` (ns) from a designed waveform.

    Entries ``omega * exp(i (detuning * t - F_j(t)))`` couple each qubit to
    the bus, with ``F_j = eta_j sin(modulation * t) + pi * flag_j`` sampled
    from the waveform grid (linear interpolation for eta, nearest for the
    sign flag).  All drive sidebands are kept implicitly; time-averaging over
    a modulation period recovers the effective coupling ``omega * J1(eta)``.
    """
    n = waveform.eta.shape[1]
    dim = n + 2
    h = np.zeros((dim, dim), dtype=complex)
    tgrid = waveform.times
    k = int(np.clip(np.searchsorted(tgrid, t, side="right") - 1, 0, len(tgrid) - 1))
    for jq in range(n):
        eta_t = float(np.interp(t, tgrid, waveform.eta[:, jq]))
        flag = bool(waveform.phase_flags[k, jq])
        phase = params.detuning * t - eta_t * math.sin(params.modulation * t)
        if flag:
            phase -= math.pi
        h[jq + 1, n + 1] = params.omega * complex(math.cos(phase), math.sin(phase))
        h[n + 1, jq + 1] = h[jq + 1, n + 1].conjugate()
    return h


def _full_hamiltonian_batch(
    times: np.ndarray,
    params: TransmonParams,
    eta: np.ndarray,
    flags: np.ndarray,
    error: model.ErrorModel | None = None,
) -> np.ndarray:
    """Vectorized oscillating Hamiltonians on exact per-sample waveforms."""
    k, n = eta.shape
    dim = n + 2
    scale = 1.0 + (error.epsilon if error is not None else 0.0)
    delta_err = error.delta if error is not None else 0.0
    phase = (
        params.detuning * times[:, None]
        - eta * np.sin(params.modulation * times)[:, None]
        - math.pi * flags
    )
    entries = scale * params.omega * np.exp(1j * phase)
    h = np.zeros((k, dim, dim), dtype=complex)
    h[:, 1 : n + 1, n + 1] = entries
    h[:, n + 1, 1 : n + 1] = entries.conj()
    if delta_err != 0.0:
        idx = np.arange(1, n + 1)
        h[:, idx, idx] = delta_err
    return h


def minimum_full_steps(duration: float, params: TransmonParams) -> int:
    """Smallest step count satisfying the oscillation-resolution contract."""
    periods = duration * params.modulation / TWO_PI
    return int(math.ceil(periods * MIN_STEPS_PER_PERIOD))


def simulate_physical(
    spec: pulse_design.ProtocolSpec,
    params: TransmonParams,
    which: str = "full",
    steps: int | None = None,
    error: model.ErrorModel | None = None,
    saturate: bool = False,
    store_states: bool = False,
) -> SimulationResult:
    """Propagate a protocol on the transmon hardware model.

    ``which="effective"`` uses the sideband-averaged couplings (clipped the
    same way the drive would be), ``which="full"`` integrates the oscillating
    Hamiltonian with every sideband retained.  The full model enforces at
    least :data:`MIN_STEPS_PER_PERIOD` integration steps per modulation
    period.  Durations are in ns and the reported fidelity is against the
    pathway target state.
    """
    _check_resonant(params)
    if which not in ("effective", "full"):
        raise ValueError(f"unknown model {which!r}; expected 'effective' or 'full'")
    if which == "full":
        floor = minimum_full_steps(spec.duration, params)
        if steps is None:
            steps = max(4001, floor)
        elif steps < floor:
            raise ValueError(
                f"full model needs at least {floor} steps for duration "
                f"{spec.duration} ns ({MIN_STEPS_PER_PERIOD} per modulation period), "
                f"got {steps}"
            )
    elif steps is None:
        steps = 4001
    if steps < 100:
        raise ValueError(f"steps must be at least 100, got {steps}")

    half_times = np.linspace(0.0, spec.duration, 2 * steps + 1)
    rows = pulse_design.coupling_matrix(spec, half_times)
    eta, flags, _, _ = _eta_and_flags(rows, params, saturate)
    if which == "effective":
        achieved = np.where(flags, -1.0, 1.0) * params.omega * j1(eta)
        h_half = model.hamiltonians(achieved, error)
    else:
        h_half = _full_hamiltonian_batch(half_times, params, eta, flags, error)

    psi0 = pulse_design.dark_state(spec, 0.0)
    target = pulse_design.dark_state(spec, spec.duration)
    if params.noise.any_active:
        collapse = model.collapse_operators(params.noise, spec.n_qubits)
        rho0 = np.outer(psi0, psi0.conj())
        return propagate_density_half_grid(
            h_half, collapse, rho0, spec.duration, target, store_states=store_states
        )
    return propagate_state_half_grid(
        h_half, psi0, spec.duration, target, store_states=store_states
    )
