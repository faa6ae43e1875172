"""Auxiliary-angle schedules, dark-pathway states, and coupling synthesis.

A register of N qubits is star-coupled to a common bus mode through
individually tunable couplings.  Each protocol prescribes a normalized
time-dependent state whose energy expectation vanishes identically (a "dark
pathway") and inverts the Schrodinger equation along it, which yields the
per-qubit coupling waveforms in closed form.  No optimal-control iteration is
involved.  Supported protocols:

* ``QST``      -- move the excitation from qubit ``source`` to ``target``.
* ``PAIR_ESG`` -- generate a Bell pair between ``source`` and ``target``.
* ``ALL_ESG``  -- generate an equal-weight superposition over all qubits.

The inversion formulas contain cotangent terms that are 0/0 at both
endpoints.  They are removed exactly rather than regularized: the term
carrying ``dgamma2`` reduces to ``dgamma1 * cos(gamma1)`` because
``gamma2 = 1 - cos(gamma1)``, and the term carrying ``dgamma3`` factors into
a polynomial ratio times ``x*cot(x)``, which is series-guarded near zero.
Every waveform is therefore finite on [0, T] and vanishes at both ends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from darkpath import model

AMPLITUDE_MAX = 5.0

# Below this angle x*cot(x) is evaluated by its Taylor series; at 1e-6 rad
# the truncated terms are far below double precision.
_XCOT_GUARD = 1e-6


class ProtocolKind(str, Enum):
    """Which task a pulse schedule implements."""

    QST = "qst"
    PAIR_ESG = "pair_esg"
    ALL_ESG = "all_esg"

    @property
    def is_two_qubit(self) -> bool:
        return self is not ProtocolKind.ALL_ESG


def required_theta(kind: ProtocolKind, n_qubits: int) -> float:
    """Final mixing angle fixed by the protocol (and by N for ALL_ESG)."""
    if kind is ProtocolKind.QST:
        return 0.5 * math.pi
    if kind is ProtocolKind.PAIR_ESG:
        return 0.25 * math.pi
    return math.acos(math.sqrt(1.0 / n_qubits))


@dataclass(frozen=True)
class ProtocolSpec:
    """Complete description of one protocol instance.

    Parameters
    ----------
    kind : ProtocolKind or str
        Protocol selector.
    n_qubits : int
        Register size N (>= 2).  Two-qubit protocols with N > 2 park the
        remaining qubits on a shared idle waveform.
    source : int
        Qubit initially holding the excitation, 1-based.
    amplitude : float
        Peak of the bus-mixing angle, reached at T/2.  Admissible range is
        (0, 5]; values above pi/2 are allowed but drive the mixing angle past
        a cotangent sign change and are flagged at synthesis time.
    duration : float
        Total protocol time T.  Units are 1/g_max in dimensionless work and
        nanoseconds in the physical layer.
    target : int, optional
        Destination qubit for the two-qubit protocols.  Ignored for ALL_ESG.
    g_max : float
        Hardware cap on |g_j(t)|, used by synthesis feasibility checks.
    theta : float, optional
        Final mixing angle.  Filled in from ``kind`` when omitted; a supplied
        value must match the protocol's required angle.
    """

    kind: ProtocolKind
    n_qubits: int
    source: int
    amplitude: float
    duration: float
    target: int | None = None
    g_max: float = 1.0
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        if self.n_qubits < 2:
            raise ValueError("n_qubits must be >= 2")
        if not 1 <= self.source <= self.n_qubits:
            raise ValueError(f"source {self.source} outside 1..{self.n_qubits}")
        if self.kind.is_two_qubit:
            if self.target is None:
                raise ValueError("two-qubit protocols require a target qubit")
            if not 1 <= self.target <= self.n_qubits:
                raise ValueError(f"target {self.target} outside 1..{self.n_qubits}")
            if self.target == self.source:
                raise ValueError("source and target must differ")
        else:
            object.__setattr__(self, "target", None)
        if not (0.0 < self.amplitude <= AMPLITUDE_MAX):
            raise ValueError(f"amplitude must lie in (0, {AMPLITUDE_MAX}]")
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")
        if not self.g_max > 0.0:
            raise ValueError("g_max must be positive")
        want = required_theta(self.kind, self.n_qubits)
        if self.theta is None:
            object.__setattr__(self, "theta", want)
        elif abs(self.theta - want) > 1e-9:
            raise ValueError(
                f"theta {self.theta} inconsistent with {self.kind.value} "
                f"(requires {want})"
            )

    @property
    def dim(self) -> int:
        return self.n_qubits + 2

    @property
    def bus_index(self) -> int:
        return self.n_qubits + 1

    @property
    def idle_qubits(self) -> tuple[int, ...]:
        if self.kind.is_two_qubit:
            return tuple(
                j for j in range(1, self.n_qubits + 1) if j not in (self.source, self.target)
            )
        return tuple(j for j in range(1, self.n_qubits + 1) if j != self.source)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_qubits": self.n_qubits,
            "source": self.source,
            "target": self.target,
            "amplitude": self.amplitude,
            "duration": self.duration,
            "g_max": self.g_max,
            "theta": self.theta,
        }


@dataclass
class GammaPoint:
    """Auxiliary angles and their exact time derivatives at one time.

    Fields hold scalars or arrays depending on what was sampled.  For
    ALL_ESG the third angle is unused and stays zero.
    """

    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    dgamma1: np.ndarray
    dgamma2: np.ndarray
    dgamma3: np.ndarray


@dataclass
class PulseSchedule:
    """Sampled coupling waveforms on a uniform time grid.

    ``couplings[:, j-1]`` is the waveform of qubit ``j``.  The peak absolute
    coupling over the grid is recorded for feasibility reporting.
    """

    times: np.ndarray
    couplings: np.ndarray
    spec: ProtocolSpec
    peak_coupling: float


@dataclass
class PathwayReport:
    """Worst-case residuals of the analytic pathway over a time grid."""

    max_norm_error: float
    max_energy_error: float
    max_residual: float
    n_grid: int


def _times(spec: ProtocolSpec, t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > spec.duration):
        raise ValueError(f"time outside [0, {spec.duration}]")
    return arr


def _xcotx(x: np.ndarray) -> np.ndarray:
    """x*cot(x), finite at zero, series-guarded below the overflow region."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _XCOT_GUARD
    safe = np.where(small, 1.0, x)
    direct = safe * np.cos(safe) / np.sin(safe)
    series = 1.0 - x * x / 3.0 - x**4 / 45.0
    return np.where(small, series, direct)


def _ramp(s: np.ndarray) -> np.ndarray:
    # Degree-7 smoothstep: value 0 -> 1 with three vanishing derivatives at
    # both ends; derivative in s is 140 s^3 (1-s)^3.
    return s**4 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)))


def _bell_angle(spec: ProtocolSpec, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bus-mixing angle gamma1 = 16 A s^2 (1-s)^2 and its t-derivative."""
    a = spec.amplitude
    u = s * (1.0 - s)
    g1 = 16.0 * a * u * u
    dg1 = 32.0 * a * u * (1.0 - 2.0 * s) / spec.duration
    return g1, dg1


def gamma_two_qubit(spec: ProtocolSpec, t) -> GammaPoint:
    """Auxiliary angles for QST and PAIR_ESG at time(s) ``t``.

    The first angle is the quartic bump peaking at ``amplitude`` at T/2, the
    second is slaved to it as ``1 - cos(gamma1)``, and the third ramps from 0
    to ``theta`` along the degree-7 smoothstep.  All derivatives are exact.
    """
    if not spec.kind.is_two_qubit:
        raise ValueError("gamma_two_qubit needs a QST or PAIR_ESG spec")
    tt = _times(spec, t)
    s = tt / spec.duration
    g1, dg1 = _bell_angle(spec, s)
    g2 = 1.0 - np.cos(g1)
    dg2 = np.sin(g1) * dg1
    g3 = spec.theta * _ramp(s)
    dg3 = spec.theta * 140.0 * (s * (1.0 - s)) ** 3 / spec.duration
    return GammaPoint(g1, g2, g3, dg1, dg2, dg3)


def gamma_all_qubit(spec: ProtocolSpec, t) -> GammaPoint:
    """Auxiliary angles for ALL_ESG at time(s) ``t``.

    Only two angles are active: the quartic bus-mixing bump and a smoothstep
    ramp from 0 to ``theta = arccos(sqrt(1/N))``.
    """
    if spec.kind.is_two_qubit:
        raise ValueError("gamma_all_qubit needs an ALL_ESG spec")
    tt = _times(spec, t)
    s = tt / spec.duration
    g1, dg1 = _bell_angle(spec, s)
    g2 = spec.theta * _ramp(s)
    dg2 = spec.theta * 140.0 * (s * (1.0 - s)) ** 3 / spec.duration
    zero = np.zeros_like(g1)
    return GammaPoint(g1, g2, zero, dg1, dg2, zero.copy())


def _check_finite(*arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise RuntimeError(
                "non-finite coupling value; the mixing angle crossed a "
                "cotangent pole (amplitude above pi is outside the usable range)"
            )


def couplings_two_qubit(spec: ProtocolSpec, t):
    """Coupling waveforms ``(g_source, g_target, g_idle)`` for QST/PAIR_ESG.

    ``g_idle`` is shared by every parked qubit and is ``None`` when N = 2.
    The cotangent products are evaluated through their exact closed forms,
    see the module docstring, so both endpoints give exactly zero.
    """
    if not spec.kind.is_two_qubit:
        raise ValueError("couplings_two_qubit needs a QST or PAIR_ESG spec")
    tt = _times(spec, t)
    s = tt / spec.duration
    g = gamma_two_qubit(spec, tt)
    c1, c2, c3 = np.cos(g.gamma1), np.cos(g.gamma2), np.cos(g.gamma3)
    s2, s3 = np.sin(g.gamma2), np.sin(g.gamma3)
    # dgamma2 * cot(gamma1) == dgamma1 * cos(gamma1), exactly.
    dg2_cot = g.dgamma1 * c1
    # dgamma3 * cot(gamma1) == (35 theta / 4 A T) s(1-s) * x*cot(x)|_{gamma1}.
    dg3_cot = (
        35.0
        * spec.theta
        / (4.0 * spec.amplitude * spec.duration)
        * s
        * (1.0 - s)
        * _xcotx(g.gamma1)
    )
    g_src = g.dgamma1 * c2 * c3 + dg2_cot * s2 * c3 + dg3_cot * c2 * s3
    g_tgt = dg3_cot * c2 * c3 - g.dgamma1 * c2 * s3 - dg2_cot * s2 * s3
    if spec.n_qubits == 2:
        _check_finite(g_src, g_tgt)
        return g_src, g_tgt, None
    g_idle = (dg2_cot * c2 - g.dgamma1 * s2) / math.sqrt(spec.n_qubits - 2)
    _check_finite(g_src, g_tgt, g_idle)
    return g_src, g_tgt, g_idle


def couplings_all_qubit(spec: ProtocolSpec, t):
    """Coupling waveforms ``(g_source, g_other)`` for ALL_ESG.

    ``g_other`` is shared by every qubit except the source.
    """
    if spec.kind.is_two_qubit:
        raise ValueError("couplings_all_qubit needs an ALL_ESG spec")
    tt = _times(spec, t)
    s = tt / spec.duration
    g = gamma_all_qubit(spec, tt)
    c1, c2 = np.cos(g.gamma1), np.cos(g.gamma2)
    s2 = np.sin(g.gamma2)
    dg2_cot = (
        35.0
        * spec.theta
        / (4.0 * spec.amplitude * spec.duration)
        * s
        * (1.0 - s)
        * _xcotx(g.gamma1)
    )
    g_src = dg2_cot * s2 + g.dgamma1 * c2
    g_other = (dg2_cot * c2 - g.dgamma1 * s2) / math.sqrt(spec.n_qubits - 1)
    _check_finite(g_src, g_other)
    return g_src, g_other


def coupling_matrix(spec: ProtocolSpec, times) -> np.ndarray:
    """Per-qubit couplings sampled at ``times``, shape (K, N)."""
    tt = np.atleast_1d(_times(spec, times))
    out = np.empty((tt.size, spec.n_qubits))
    if spec.kind.is_two_qubit:
        g_src, g_tgt, g_idle = couplings_two_qubit(spec, tt)
        for j in range(1, spec.n_qubits + 1):
            if j == spec.source:
                out[:, j - 1] = g_src
            elif j == spec.target:
                out[:, j - 1] = g_tgt
            else:
                out[:, j - 1] = g_idle
    else:
        g_src, g_other = couplings_all_qubit(spec, tt)
        for j in range(1, spec.n_qubits + 1):
            out[:, j - 1] = g_src if j == spec.source else g_other
    return out


def _pathway_amplitudes(spec: ProtocolSpec, times) -> tuple[np.ndarray, np.ndarray]:
    """Pathway states and their exact time derivatives, shapes (K, dim)."""
    tt = np.atleast_1d(_times(spec, times))
    dim = spec.dim
    psi = np.zeros((tt.size, dim), dtype=complex)
    dpsi = np.zeros((tt.size, dim), dtype=complex)
    if spec.kind.is_two_qubit:
        g = gamma_two_qubit(spec, tt)
        c1, s1 = np.cos(g.gamma1), np.sin(g.gamma1)
        c2, s2 = np.cos(g.gamma2), np.sin(g.gamma2)
        c3, s3 = np.cos(g.gamma3), np.sin(g.gamma3)
        psi[:, spec.source] = c1 * c2 * c3
        psi[:, spec.target] = -c1 * c2 * s3
        dpsi[:, spec.source] = (
            -g.dgamma1 * s1 * c2 * c3 - g.dgamma2 * c1 * s2 * c3 - g.dgamma3 * c1 * c2 * s3
        )
        dpsi[:, spec.target] = (
            g.dgamma1 * s1 * c2 * s3 + g.dgamma2 * c1 * s2 * s3 - g.dgamma3 * c1 * c2 * c3
        )
        if spec.n_qubits > 2:
            root = math.sqrt(spec.n_qubits - 2)
            for j in spec.idle_qubits:
                psi[:, j] = -c1 * s2 / root
                dpsi[:, j] = (g.dgamma1 * s1 * s2 - g.dgamma2 * c1 * c2) / root
        psi[:, spec.bus_index] = -1j * s1
        dpsi[:, spec.bus_index] = -1j * g.dgamma1 * c1
    else:
        g = gamma_all_qubit(spec, tt)
        c1, s1 = np.cos(g.gamma1), np.sin(g.gamma1)
        c2, s2 = np.cos(g.gamma2), np.sin(g.gamma2)
        psi[:, spec.source] = c1 * c2
        dpsi[:, spec.source] = -g.dgamma1 * s1 * c2 - g.dgamma2 * c1 * s2
        root = math.sqrt(spec.n_qubits - 1)
        for j in spec.idle_qubits:
            psi[:, j] = -c1 * s2 / root
            dpsi[:, j] = (g.dgamma1 * s1 * s2 - g.dgamma2 * c1 * c2) / root
        psi[:, spec.bus_index] = -1j * s1
        dpsi[:, spec.bus_index] = -1j * g.dgamma1 * c1
    return psi, dpsi


def dark_state(spec: ProtocolSpec, t: float) -> np.ndarray:
    """Normalized pathway state at a single time, shape (N+2,).

    At t = 0 this is the bare source state.  At t = T it is the protocol
    outcome as the pathway produces it, signs included: ``-|target>`` for
    QST, ``(|source> - |target>)/sqrt(2)`` for PAIR_ESG, and
    ``(|source> - sum of others)/sqrt(N)`` for ALL_ESG.  Fidelities are
    reported against this state, not against a re-phased variant.
    """
    psi, _ = _pathway_amplitudes(spec, float(t))
    return psi[0]


def dark_state_trajectory(spec: ProtocolSpec, times) -> np.ndarray:
    """Pathway states at many times, shape (K, N+2)."""
    psi, _ = _pathway_amplitudes(spec, times)
    return psi


def synthesize(spec: ProtocolSpec, n_samples: int = 2001) -> PulseSchedule:
    """Sample the protocol's coupling waveforms on a uniform grid.

    Raises if the waveforms exceed ``spec.g_max`` beyond grid tolerance, and
    warns when ``amplitude`` exceeds pi/2 (usable, but the mixing angle then
    crosses a cotangent sign change and peak couplings grow quickly).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if spec.amplitude > 0.5 * math.pi:
        warnings.warn(
            f"amplitude {spec.amplitude:.4g} exceeds pi/2; the bus-mixing angle "
            "passes a cotangent sign change",
            stacklevel=2,
        )
    times = np.linspace(0.0, spec.duration, n_samples)
    couplings = coupling_matrix(spec, times)
    peak = float(np.max(np.abs(couplings)))
    if peak > spec.g_max * (1.0 + 1e-6):
        raise ValueError(
            f"peak coupling {peak:.6g} exceeds the cap {spec.g_max:.6g}; "
            "increase duration or lower amplitude"
        )
    return PulseSchedule(times, couplings, spec, peak)


def verify_pathway(spec: ProtocolSpec, times=None) -> PathwayReport:
    """Check the analytic pathway against its defining properties.

    Evaluates, on a time grid, the worst deviation from unit norm, the worst
    energy expectation (identically zero for a dark pathway), and the worst
    norm of the Schrodinger residual ``i dpsi/dt - H psi`` built from the
    synthesized couplings.  All three are exact identities, so the returned
    numbers sit at accumulated rounding level.
    """
    if times is None:
        times = np.linspace(0.0, spec.duration, 10001)
    tt = np.atleast_1d(_times(spec, times))
    psi, dpsi = _pathway_amplitudes(spec, tt)
    hams = model.hamiltonians(coupling_matrix(spec, tt))
    h_psi = np.einsum("kij,kj->ki", hams, psi)
    norm_err = np.abs(np.einsum("ki,ki->k", psi.conj(), psi).real - 1.0)
    energy = np.abs(np.einsum("ki,ki->k", psi.conj(), h_psi))
    residual = np.linalg.norm(1j * dpsi - h_psi, axis=1)
    return PathwayReport(
        max_norm_error=float(norm_err.max()),
        max_energy_error=float(energy.max()),
        max_residual=float(residual.max()),
        n_grid=int(tt.size),
    )
