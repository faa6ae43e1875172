"""Minimal-time amplitude search under a peak-coupling cap.

Every coupling waveform scales as ``g(t) = ghat(t/T) / T``, so the tightest
duration compatible with a hardware cap is ``T(A) = C(A) / g_max`` where
``C(A)`` is the peak of the dimensionless waveforms over the unit interval.
``C(A)`` diverges at small amplitude (the slow-angle terms carry 1/A) and
grows again at large amplitude (the bus-mixing bump steepens), so it has an
interior minimum; finding it is a one-dimensional problem solved here with a
coarse scan plus golden-section refinement.  Everything is deterministic:
fixed grids, fixed iteration counts, no stochastic restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from darkpath import pulse_design
from darkpath.pulse_design import ProtocolSpec

_PEAK_GRID = 100_001
_COARSE_STEP = 1e-2
_GOLDEN_TOL = 1e-4
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class TimeCurve:
    """Minimal duration against amplitude for one protocol."""

    amplitudes: np.ndarray
    durations: np.ndarray
    optimal_amplitude: float
    optimal_duration: float

    def as_rows(self) -> np.ndarray:
        return np.column_stack([self.amplitudes, self.durations])


def _branch_peak(values: np.ndarray, s_grid: np.ndarray, evaluate) -> float:
    """Grid peak of |values| with one parabolic refinement around the argmax."""
    mags = np.abs(values)
    i = int(np.argmax(mags))
    peak = float(mags[i])
    if 0 < i < mags.size - 1:
        y0, y1, y2 = float(mags[i - 1]), peak, float(mags[i + 1])
        denom = y0 - 2.0 * y1 + y2
        if denom < 0.0:
            h = s_grid[1] - s_grid[0]
            off = 0.5 * h * (y0 - y2) / denom
            if abs(off) <= h:
                peak = max(peak, abs(float(evaluate(s_grid[i] + off))))
    return peak


def dimensionless_peak(template: ProtocolSpec, amplitude: float) -> float:
    """Peak |ghat| over the unit interval at the given amplitude.

    The template fixes protocol kind, register size, and port choice; its
    amplitude and duration fields are ignored.  Evaluation uses a dense
    grid of 1e5 points with local parabolic refinement of each branch peak.
    """
    spec = replace(template, amplitude=amplitude, duration=1.0)
    s = np.linspace(0.0, 1.0, _PEAK_GRID)
    if spec.kind.is_two_qubit:
        couplings = pulse_design.couplings_two_qubit(spec, s)
        branches = [b for b in couplings if b is not None]

        def eval_branch(idx):
            def call(x):
                vals = pulse_design.couplings_two_qubit(spec, x)
                picked = [b for b in vals if b is not None]
                return picked[idx]

            return call

    else:
        branches = list(pulse_design.couplings_all_qubit(spec, s))

        def eval_branch(idx):
            def call(x):
                return pulse_design.couplings_all_qubit(spec, x)[idx]

            return call

    peaks = [
        _branch_peak(branch, s, eval_branch(idx)) for idx, branch in enumerate(branches)
    ]
    return float(max(peaks))


def time_curve(
    template: ProtocolSpec, amplitudes: np.ndarray, g_max: float = 1.0
) -> TimeCurve:
    """Minimal duration ``C(A) / g_max`` over a grid of amplitudes.

    The reported optimum is the grid argmin; use :func:`optimal_amplitude`
    for a refined value.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    if amplitudes.ndim != 1 or amplitudes.size < 2:
        raise ValueError("amplitudes must be a 1-d grid with at least 2 points")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    durations = np.array(
        [dimensionless_peak(template, a) / g_max for a in amplitudes]
    )
    i = int(np.argmin(durations))
    return TimeCurve(amplitudes, durations, float(amplitudes[i]), float(durations[i]))


def optimal_amplitude(
    template: ProtocolSpec,
    bracket: tuple[float, float] = (0.05, 2.0),
    g_max: float = 1.0,
) -> tuple[float, float]:
    """Amplitude minimizing the protocol duration under the coupling cap.

    Scans the bracket at step 0.01, then golden-sections the winning
    neighborhood down to an amplitude window of 1e-4.  Returns the refined
    amplitude and the corresponding minimal duration.  Raises if the coarse
    minimum sits on the bracket edge, which means the bracket clipped the
    true optimum.
    """
    lo, hi = bracket
    if not 0.0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")
    n = int(round((hi - lo) / _COARSE_STEP)) + 1
    coarse = np.linspace(lo, hi, n)
    values = [dimensionless_peak(template, a) for a in coarse]
    i = int(np.argmin(values))
    if i == 0 or i == n - 1:
        raise ValueError(
            f"duration still decreasing at bracket edge A={coarse[i]:.4g}; "
            "widen the bracket"
        )

    a, b = float(coarse[i - 1]), float(coarse[i + 1])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = dimensionless_peak(template, c)
    fd = dimensionless_peak(template, d)
    while b - a > _GOLDEN_TOL:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = dimensionless_peak(template, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = dimensionless_peak(template, d)
    best = 0.5 * (a + b)
    return best, dimensionless_peak(template, best) / g_max
