"""Restricted-basis operators for a qubit register star-coupled to a bus.

The Hilbert space kept in play is spanned by the shared vacuum ``|G>``, the
single-excitation qubit states ``|1> .. |N>``, and the one-photon bus state
``|a>``, in that order.  The vacuum is included so decay channels have a
destination and dissipative evolution stays trace preserving on this space;
the coherent dynamics never couples into it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GROUND = 0


@dataclass(frozen=True)
class BasisIndex:
    """Index layout of the (N+2)-dimensional restricted basis."""

    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")

    @property
    def size(self) -> int:
        return self.n_qubits + 2

    @property
    def ground(self) -> int:
        return GROUND

    @property
    def bus(self) -> int:
        return self.n_qubits + 1

    def qubit(self, j: int) -> int:
        """Basis index of the state with qubit ``j`` excited (1-based)."""
        if not 1 <= j <= self.n_qubits:
            raise ValueError(f"qubit index {j} outside 1..{self.n_qubits}")
        return j

    def labels(self) -> list[str]:
        return ["G"] + [str(j) for j in range(1, self.n_qubits + 1)] + ["a"]


@dataclass(frozen=True)
class NoiseModel:
    """Decay and dephasing rates, one pair for the qubits and one for the bus.

    Rates are angular frequencies in the same units as the couplings.  The
    qubit rates apply to every qubit individually; decay empties an excited
    state into ``|G>`` and dephasing scrambles its phase in place.  See
    :func:`collapse_operators` for how quoted rates map onto dissipator
    weights.
    """

    decay_qubit: float = 0.0
    dephase_qubit: float = 0.0
    decay_bus: float = 0.0
    dephase_bus: float = 0.0

    def __post_init__(self):
        for name in ("decay_qubit", "dephase_qubit", "decay_bus", "dephase_bus"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @classmethod
    def uniform(cls, rate: float) -> "NoiseModel":
        """Same rate on every channel."""
        return cls(rate, rate, rate, rate)

    @property
    def any_active(self) -> bool:
        return (
            self.decay_qubit > 0.0
            or self.dephase_qubit > 0.0
            or self.decay_bus > 0.0
            or self.dephase_bus > 0.0
        )


@dataclass(frozen=True)
class ErrorModel:
    """Systematic control errors applied to the ideal Hamiltonian.

    ``epsilon`` rescales every coupling by ``1 + epsilon`` (common amplitude
    miscalibration).  ``delta`` adds a uniform static shift to the qubit
    single-excitation levels only; the bus and the vacuum are not shifted.
    """

    epsilon: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or not math.isfinite(self.delta):
            raise ValueError("error parameters must be finite")


def hamiltonians(coupling_rows: np.ndarray, error: ErrorModel | None = None) -> np.ndarray:
    """Star-coupling Hamiltonians for a batch of coupling samples.

    Parameters
    ----------
    coupling_rows : array, shape (K, N) or (N,)
        Per-qubit couplings to the bus at K times.
    error : ErrorModel, optional
        Systematic control error to fold in.

    Returns
    -------
    array, shape (K, N+2, N+2) or (N+2, N+2), complex
        ``H[j, a] = H[a, j] = (1 + epsilon) g_j`` with ``delta`` on the qubit
        diagonal.  Row and column of ``|G>`` are identically zero.
    """
    g = np.asarray(coupling_rows, dtype=float)
    squeeze = g.ndim == 1
    if squeeze:
        g = g[None, :]
    if g.ndim != 2:
        raise ValueError("coupling_rows must be one or two dimensional")
    n = g.shape[1]
    if n < 1:
        raise ValueError("need at least one qubit coupling")
    scale = 1.0 + (error.epsilon if error is not None else 0.0)
    delta = error.delta if error is not None else 0.0
    dim = n + 2
    h = np.zeros((g.shape[0], dim, dim), dtype=complex)
    h[:, 1 : n + 1, n + 1] = scale * g
    h[:, n + 1, 1 : n + 1] = scale * g
    if delta != 0.0:
        idx = np.arange(1, n + 1)
        h[:, idx, idx] = delta
    return h[0] if squeeze else h


def hamiltonian(couplings: np.ndarray, error: ErrorModel | None = None) -> np.ndarray:
    """Single-time star-coupling Hamiltonian (see :func:`hamiltonians`)."""
    return hamiltonians(np.asarray(couplings, dtype=float), error)


def collapse_operators(noise: NoiseModel, n_qubits: int) -> list[tuple[float, np.ndarray]]:
    """Collapse channels as (weight, operator) pairs, zero-rate channels omitted.

    Quoted rates are linewidth-style figures: each channel enters the master
    equation with dissipator weight equal to half the quoted rate.  Decay of
    qubit ``k`` acts through the lowering operator ``|G><k|`` (bus decay
    through ``|G><a|``), so an excited population relaxes at ``decay_qubit/2``.
    Dephasing acts through the excitation projector ``|k><k|``; a coherence
    between two excited basis states therefore damps at
    ``decay_qubit/2 + dephase_qubit/2`` when both rates are equal on both
    states.

    A dissipator built on a projector equals one quarter of the dissipator on
    the corresponding diagonal ``+1/-1`` reflection, because dissipators are
    unchanged when a Hermitian operator is shifted by a multiple of the
    identity.  Callers preferring the reflection convention can rescale the
    dephasing rates by four.

    Order is deterministic: qubit decays 1..N, bus decay, qubit dephasings
    1..N, bus dephasing.
    """
    basis = BasisIndex(n_qubits)
    dim = basis.size
    ops: list[tuple[float, np.ndarray]] = []

    def lowering(idx: int) -> np.ndarray:
        op = np.zeros((dim, dim))
        op[GROUND, idx] = 1.0
        return op

    def projector(idx: int) -> np.ndarray:
        op = np.zeros((dim, dim))
        op[idx, idx] = 1.0
        return op

    if noise.decay_qubit > 0.0:
        for k in range(1, n_qubits + 1):
            ops.append((0.5 * noise.decay_qubit, lowering(k)))
    if noise.decay_bus > 0.0:
        ops.append((0.5 * noise.decay_bus, lowering(basis.bus)))
    if noise.dephase_qubit > 0.0:
        for k in range(1, n_qubits + 1):
            ops.append((0.5 * noise.dephase_qubit, projector(k)))
    if noise.dephase_bus > 0.0:
        ops.append((0.5 * noise.dephase_bus, projector(basis.bus)))
    return ops
