"""Fixed-step propagation of the star-coupled model, closed and open.

Both propagators integrate with classical fourth-order Runge-Kutta on a
uniform grid, evaluating the analytic coupling waveforms at the half steps
rather than interpolating stored samples.  Fixed stepping keeps runs
bit-reproducible; there is no adaptive control anywhere.  Accuracy is the
caller's contract: the density-matrix propagator aborts when the trace
drifts past 1e-6, with the advice to rerun on a finer grid.

The state/trace bookkeeping recorded along the way (populations, fidelity
against the target, trace and Hermiticity drift) is what the reporting layer
writes out; positivity is monitored through those diagnostics but never
enforced by projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from darkpath import model, pulse_design
from darkpath.model import ErrorModel, NoiseModel
from darkpath.pulse_design import ProtocolSpec


class NumericalContractError(RuntimeError):
    """Raised when a propagation leaves its accuracy contract."""


@dataclass
class SimulationResult:
    """Time series and diagnostics from one propagation.

    ``populations[k, i]`` is the population of basis state ``i`` at
    ``times[k]`` and ``fidelities[k]`` the overlap with the target state at
    that time; ``fidelity`` is its final value.  For pure-state runs the
    trace deviation field carries the norm deviation and the Hermiticity
    deviation is zero.  Full states or density matrices are stored only on
    request.
    """

    times: np.ndarray
    populations: np.ndarray
    fidelities: np.ndarray
    fidelity: float
    max_trace_deviation: float
    max_hermiticity_deviation: float
    states: np.ndarray | None = None
    density_matrices: np.ndarray | None = None


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Overlap ``<target| rho |target>`` of a density matrix with a pure state.

    The imaginary part must vanish to 1e-10; a larger value indicates a
    corrupted (non-Hermitian) matrix and raises instead of being silently
    discarded.
    """
    rho = np.asarray(rho, dtype=complex)
    v = np.asarray(target, dtype=complex)
    if rho.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, target {v.shape}")
    if abs(np.vdot(v, v).real - 1.0) > 1e-8:
        raise ValueError("target state is not normalized")
    value = np.vdot(v, rho @ v)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}")
    return float(value.real)


def _half_grid(duration: float, steps: int) -> np.ndarray:
    return np.linspace(0.0, duration, 2 * steps + 1)


def propagate_state_half_grid(
    h_half: np.ndarray,
    psi0: np.ndarray,
    duration: float,
    target: np.ndarray,
    store_states: bool = False,
) -> SimulationResult:
    """RK4 Schrodinger propagation given Hamiltonians on the half-step grid.

    ``h_half`` has shape (2*steps+1, dim, dim); entry ``2k`` sits at grid
    time ``k``.  This is the shared core; the public entry points build
    ``h_half`` from a spec or a drive waveform.
    """
    steps = (h_half.shape[0] - 1) // 2
    dt = duration / steps
    dim = psi0.size
    psi = np.array(psi0, dtype=complex)
    pops = np.empty((steps + 1, dim))
    fids = np.empty(steps + 1)
    states = np.empty((steps + 1, dim), dtype=complex) if store_states else None
    max_norm_dev = 0.0

    def record(k: int, vec: np.ndarray) -> float:
        pops[k] = np.abs(vec) ** 2
        fids[k] = abs(np.vdot(target, vec)) ** 2
        if states is not None:
            states[k] = vec
        return abs(float(pops[k].sum()) - 1.0)

    max_norm_dev = record(0, psi)
    for k in range(steps):
        h0 = h_half[2 * k]
        hm = h_half[2 * k + 1]
        h1 = h_half[2 * k + 2]
        k1 = -1j * (h0 @ psi)
        k2 = -1j * (hm @ (psi + (0.5 * dt) * k1))
        k3 = -1j * (hm @ (psi + (0.5 * dt) * k2))
        k4 = -1j * (h1 @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        max_norm_dev = max(max_norm_dev, record(k + 1, psi))

    return SimulationResult(
        times=np.linspace(0.0, duration, steps + 1),
        populations=pops,
        fidelities=fids,
        fidelity=float(fids[-1]),
        max_trace_deviation=float(max_norm_dev),
        max_hermiticity_deviation=0.0,
        states=states,
    )


def _dissipator_superoperator(
    collapse: list[tuple[float, np.ndarray]], dim: int
) -> np.ndarray | None:
    """Row-major superoperator of the time-independent dissipator.

    For each collapse operator D with rate r the contribution is
    ``r (D rho D+ - {D+ D, rho}/2)``; with row-major vec this is
    ``r (kron(D, conj(D)) - kron(D+D, I)/2 - kron(I, (D+D)^T)/2)``.
    """
    if not collapse:
        return None
    eye = np.eye(dim)
    sup = np.zeros((dim * dim, dim * dim), dtype=complex)
    gain = np.zeros_like(eye, dtype=complex)
    for rate, op in collapse:
        sup += rate * np.kron(op, op.conj())
        gain += rate * (op.conj().T @ op)
    sup -= 0.5 * np.kron(gain, eye) + 0.5 * np.kron(eye, gain.T)
    return sup


def propagate_density_half_grid(
    h_half: np.ndarray,
    collapse: list[tuple[float, np.ndarray]],
    rho0: np.ndarray,
    duration: float,
    target: np.ndarray,
    store_states: bool = False,
) -> SimulationResult:
    """RK4 master-equation propagation given Hamiltonians on the half grid.

    The equation of motion is ``drho/dt = i[rho, H] + dissipator`` with the
    dissipator ``D rho D+ - D+D rho/2 - rho D+D/2`` summed over the weighted
    collapse operators.  Aborts with :class:`NumericalContractError` if the
    trace drifts beyond 1e-6 at any recorded time.
    """
    steps = (h_half.shape[0] - 1) // 2
    dt = duration / steps
    dim = rho0.shape[0]
    sup = _dissipator_superoperator(collapse, dim)
    rho = np.array(rho0, dtype=complex)
    pops = np.empty((steps + 1, dim))
    fids = np.empty(steps + 1)
    rhos = np.empty((steps + 1, dim, dim), dtype=complex) if store_states else None
    max_trace_dev = 0.0
    max_herm_dev = 0.0

    def rhs(h: np.ndarray, r: np.ndarray) -> np.ndarray:
        out = -1j * (h @ r - r @ h)
        if sup is not None:
            out = out + (sup @ r.reshape(-1)).reshape(dim, dim)
        return out

    def record(k: int, r: np.ndarray) -> tuple[float, float]:
        diag = np.diagonal(r).real
        pops[k] = diag
        fids[k] = fidelity(r, target)
        if rhos is not None:
            rhos[k] = r
        trace_dev = abs(float(diag.sum()) - 1.0)
        herm_dev = float(np.max(np.abs(r - r.conj().T)))
        return trace_dev, herm_dev

    trace_dev, herm_dev = record(0, rho)
    max_trace_dev, max_herm_dev = trace_dev, herm_dev
    for k in range(steps):
        h0 = h_half[2 * k]
        hm = h_half[2 * k + 1]
        h1 = h_half[2 * k + 2]
        k1 = rhs(h0, rho)
        k2 = rhs(hm, rho + (0.5 * dt) * k1)
        k3 = rhs(hm, rho + (0.5 * dt) * k2)
        k4 = rhs(h1, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        trace_dev, herm_dev = record(k + 1, rho)
        max_trace_dev = max(max_trace_dev, trace_dev)
        max_herm_dev = max(max_herm_dev, herm_dev)

    if max_trace_dev > 1e-6:
        raise NumericalContractError(
            f"trace deviation reached {max_trace_dev:.3e} (contract 1e-6); "
            "rerun with more steps"
        )
    return SimulationResult(
        times=np.linspace(0.0, duration, steps + 1),
        populations=pops,
        fidelities=fids,
        fidelity=float(fids[-1]),
        max_trace_deviation=float(max_trace_dev),
        max_hermiticity_deviation=float(max_herm_dev),
        density_matrices=rhos,
    )


def _spec_hamiltonians(spec: ProtocolSpec, error: ErrorModel | None, steps: int) -> np.ndarray:
    grid = _half_grid(spec.duration, steps)
    return model.hamiltonians(pulse_design.coupling_matrix(spec, grid), error)


def propagate_schrodinger(
    spec: ProtocolSpec,
    error: ErrorModel | None = None,
    psi0: np.ndarray | None = None,
    steps: int = 4001,
    *,
    target: np.ndarray | None = None,
    store_states: bool = False,
) -> SimulationResult:
    """Closed-system propagation of a protocol under optional control errors.

    Parameters
    ----------
    spec : ProtocolSpec
        Protocol whose analytic couplings drive the evolution.
    error : ErrorModel, optional
        Amplitude and detuning errors folded into the Hamiltonian.
    psi0 : array, optional
        Initial state; defaults to the pathway start (the bare source state).
    steps : int
        Number of RK4 steps, at least 100.
    target : array, optional
        Fidelity reference; defaults to the pathway state at time T.
    store_states : bool
        Keep the full state trajectory on the result.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    if psi0 is None:
        psi0 = pulse_design.dark_state(spec, 0.0)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.dim,):
        raise ValueError(f"psi0 must have shape ({spec.dim},)")
    if abs(np.vdot(psi0, psi0).real - 1.0) > 1e-8:
        raise ValueError("psi0 is not normalized")
    if target is None:
        target = pulse_design.dark_state(spec, spec.duration)
    h_half = _spec_hamiltonians(spec, error, steps)
    return propagate_state_half_grid(h_half, psi0, spec.duration, target, store_states)


def _check_density(rho: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise ValueError(f"rho0 must have shape ({dim}, {dim})")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("rho0 is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("rho0 does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise ValueError("rho0 has a negative eigenvalue")
    return rho


def propagate_lindblad(
    spec: ProtocolSpec,
    error: ErrorModel | None = None,
    noise: NoiseModel | None = None,
    rho0: np.ndarray | None = None,
    steps: int = 4001,
    *,
    target: np.ndarray | None = None,
    store_states: bool = False,
) -> SimulationResult:
    """Open-system propagation with decay and dephasing on qubits and bus.

    Same control-error handling as :func:`propagate_schrodinger`; the noise
    rates enter through the collapse operators of :mod:`darkpath.model`.
    ``rho0`` defaults to the projector onto the pathway start.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    if noise is None:
        noise = NoiseModel()
    if rho0 is None:
        start = pulse_design.dark_state(spec, 0.0)
        rho0 = np.outer(start, start.conj())
    rho0 = _check_density(rho0, spec.dim)
    if target is None:
        target = pulse_design.dark_state(spec, spec.duration)
    h_half = _spec_hamiltonians(spec, error, steps)
    collapse = model.collapse_operators(noise, spec.n_qubits)
    return propagate_density_half_grid(
        h_half, collapse, rho0, spec.duration, target, store_states
    )
