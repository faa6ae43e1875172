"""The nine headline acceptance checks, one test per criterion.

Each test runs its full check, records a single PASS or FAIL line for the
terminal summary, and then asserts.  Checks that compare against recorded
reference values state the tolerance next to the number.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
from conftest import record_criterion

from darkpath import cli, dynamics, optimize, pulse_design, scans, transmon
from darkpath.model import NoiseModel
from darkpath.pulse_design import ProtocolKind, ProtocolSpec

TWO_PI = 2.0 * np.pi

REFERENCE_POINTS = {
    ProtocolKind.QST: (0.7365, 3.0),
    ProtocolKind.PAIR_ESG: (0.7138, 2.8),
    ProtocolKind.ALL_ESG: (0.6143, TWO_PI / 3.0),
}


def _template(kind, n_qubits=3):
    target = 3 if kind is not ProtocolKind.ALL_ESG else None
    return ProtocolSpec(kind=kind, n_qubits=n_qubits, source=1, target=target,
                        amplitude=1.0, duration=1.0)


def _spec(kind, amplitude, duration, n_qubits=3):
    return replace(_template(kind, n_qubits), amplitude=amplitude,
                   duration=duration)


def _verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    record_criterion(line)
    print(line)
    return line


def test_criterion_1_minimal_time_optima():
    t0 = time.time()
    found = {}
    for kind in ProtocolKind:
        found[kind] = optimize.optimal_amplitude(_template(kind))
    elapsed = time.time() - t0
    windows = {
        ProtocolKind.QST: (0.7365, 0.003, 3.0, 0.05),
        ProtocolKind.PAIR_ESG: (0.7138, 0.003, 2.8, 0.05),
        ProtocolKind.ALL_ESG: (0.6143, 0.003, TWO_PI / 3.0, 0.02),
    }
    checks = []
    parts = []
    for kind, (a_ref, a_tol, t_ref, t_tol) in windows.items():
        a_got, t_got = found[kind]
        ok_a = abs(a_got - a_ref) <= a_tol
        ok_t = abs(t_got - t_ref) <= t_tol
        checks += [ok_a, ok_t]
        parts.append(
            f"{kind.value}: A*={a_got:.4f} (ref {a_ref}+-{a_tol}), "
            f"T*g={t_got:.4f} (ref {t_ref:.4f}+-{t_tol})"
        )
    checks.append(elapsed < 60.0)
    parts.append(f"runtime {elapsed:.1f}s < 60s")
    line = _verdict(1, all(checks), "; ".join(parts))
    assert all(checks), line


def test_criterion_2_reference_open_system_fidelities():
    references = {
        ProtocolKind.QST: 0.9989,
        ProtocolKind.PAIR_ESG: 0.9991,
        ProtocolKind.ALL_ESG: 0.9994,
    }
    noise = NoiseModel.uniform(1.0 / 2000.0)
    checks = []
    parts = []
    for kind, (amplitude, duration) in REFERENCE_POINTS.items():
        result = dynamics.propagate_lindblad(
            _spec(kind, amplitude, duration), noise=noise, steps=4001
        )
        ok = abs(result.fidelity - references[kind]) <= 5e-4
        checks.append(ok)
        parts.append(f"{kind.value}: F={result.fidelity:.5f} "
                     f"(ref {references[kind]}+-0.0005)")
    line = _verdict(2, all(checks), "; ".join(parts))
    assert all(checks), line


def test_criterion_3_pathway_property_suite():
    worst_norm = 0.0
    worst_energy = 0.0
    worst_tracking = 0.0
    for kind in ProtocolKind:
        for amplitude in (0.3, 0.7365, 1.2):
            template = _template(kind)
            duration = optimize.dimensionless_peak(template, amplitude)
            spec = _spec(kind, amplitude, duration)
            report = pulse_design.verify_pathway(spec)
            worst_norm = max(worst_norm, report.max_norm_error)
            worst_energy = max(worst_energy, report.max_energy_error)
            result = dynamics.propagate_schrodinger(spec, steps=4001)
            worst_tracking = max(worst_tracking, 1.0 - result.fidelity)
    ok = worst_norm < 1e-12 and worst_energy < 1e-9 and worst_tracking < 1e-5
    line = _verdict(
        3, ok,
        f"norm err {worst_norm:.2e} < 1e-12, energy err {worst_energy:.2e} "
        f"< 1e-9, tracking infidelity {worst_tracking:.2e} < 1e-5",
    )
    assert ok, line


def test_criterion_4_master_equation_contracts():
    noise = NoiseModel.uniform(1.0 / 2000.0)
    worst_trace = 0.0
    worst_herm = 0.0
    worst_equiv = 0.0
    worst_halving = 0.0
    for kind, (amplitude, duration) in REFERENCE_POINTS.items():
        spec = _spec(kind, amplitude, duration)
        noisy = dynamics.propagate_lindblad(spec, noise=noise, steps=4001)
        worst_trace = max(worst_trace, noisy.max_trace_deviation)
        worst_herm = max(worst_herm, noisy.max_hermiticity_deviation)
        closed = dynamics.propagate_schrodinger(spec, steps=4001)
        silent = dynamics.propagate_lindblad(spec, steps=4001)
        worst_equiv = max(worst_equiv, abs(closed.fidelity - silent.fidelity))
        halved = dynamics.propagate_lindblad(spec, noise=noise, steps=2001)
        worst_halving = max(worst_halving, abs(halved.fidelity - noisy.fidelity))
    ok = (worst_trace < 1e-8 and worst_herm < 1e-10 and worst_equiv < 1e-8
          and worst_halving < 1e-7)
    line = _verdict(
        4, ok,
        f"trace dev {worst_trace:.2e} < 1e-8, hermiticity {worst_herm:.2e} "
        f"< 1e-10, closed-system equivalence {worst_equiv:.2e} < 1e-8, "
        f"step halving {worst_halving:.2e} < 1e-7",
    )
    assert ok, line


def test_criterion_5_robustness_scan_shapes():
    template = _template(ProtocolKind.QST)
    amplitudes = np.linspace(0.3, 1.2, 13)
    checks = []
    parts = []

    for scan_fn, label in ((scans.scan_x_error, "eps"),
                           (scans.scan_z_error, "delta")):
        grid = scan_fn(template, amplitudes, [-0.1, 0.0, 0.1], steps=1001,
                       n_jobs=2)
        baseline = grid.column(0.0)
        checks.append(bool(np.all(baseline >= 0.9999)))
        parts.append(f"{label}=0 min {baseline.min():.5f} >= 0.9999")
        small_a = grid.fidelities[0]
        large_a = grid.fidelities[-1]
        shape_ok = small_a[0] > large_a[0] and small_a[2] > large_a[2]
        checks.append(shape_ok)
        parts.append(f"robustness at |{label}|=0.1 favors small A: {shape_ok}")

    fine = np.linspace(0.3, 1.2, 37)
    uniform = scans.scan_decoherence(template, fine, [1e-3], mode="uniform",
                                     steps=1001, n_jobs=2)
    best_a, _ = optimize.optimal_amplitude(template)
    argmax_a = float(fine[int(np.argmax(uniform.fidelities[:, 0]))])
    ok_argmax = abs(argmax_a - best_a) <= 0.05
    checks.append(ok_argmax)
    parts.append(f"argmax A {argmax_a:.3f} within 0.05 of A* {best_a:.4f}")

    bus = scans.scan_decoherence(template, [1.2], [5e-4], mode="bus-fixed",
                                 steps=1001)
    uni = scans.scan_decoherence(template, [1.2], [5e-4], mode="uniform",
                                 steps=1001)
    ok_bus = bus.fidelities[0, 0] < uni.fidelities[0, 0]
    checks.append(ok_bus)
    parts.append(
        f"bus-fixed {bus.fidelities[0, 0]:.5f} < uniform {uni.fidelities[0, 0]:.5f}"
    )
    line = _verdict(5, all(checks), "; ".join(parts))
    assert all(checks), line


def test_criterion_6_transmon_full_model():
    params = transmon.TransmonParams.from_mhz()
    cases = [
        (ProtocolKind.QST, 0.7365, 48.4, 0.9963),
        (ProtocolKind.PAIR_ESG, 0.7138, 44.6, 0.9912),
        (ProtocolKind.ALL_ESG, 0.6143, 34.0, 0.9968),
    ]
    checks = []
    parts = []
    for kind, amplitude, duration_ns, reference in cases:
        t0 = time.time()
        result = transmon.simulate_physical(
            _spec(kind, amplitude, duration_ns), params, "full", saturate=True
        )
        elapsed = time.time() - t0
        ok = abs(result.fidelity - reference) <= 0.005 and elapsed < 300.0
        checks.append(ok)
        parts.append(
            f"{kind.value}@{duration_ns}ns: F={result.fidelity:.5f} "
            f"(ref {reference}+-0.005, {elapsed:.0f}s)"
        )
    line = _verdict(6, all(checks), "; ".join(parts))
    assert all(checks), line


def test_criterion_7_qubit_count_sweep():
    rows = scans.sweep_qubit_count(range(3, 11), physical=True, n_jobs=4)
    fidelities = rows[:, 1]
    decreasing = bool(np.all(np.diff(fidelities) < 0.0))
    final = float(fidelities[-1])
    ok = decreasing and abs(final - 0.9668) <= 0.01
    line = _verdict(
        7, ok,
        f"strictly decreasing over N=3..10: {decreasing}; "
        f"N=10 F={final:.4f} (ref 0.9668+-0.01)",
    )
    assert ok, line


def test_criterion_8_bessel_layer():
    params = transmon.TransmonParams.from_mhz()
    rng = np.random.default_rng(11)
    g = rng.uniform(0.0, params.feasible_coupling, 1000)
    eta = transmon.invert_bessel(g, params.omega)
    from scipy.special import j1

    rel = np.abs(params.omega * j1(eta) - g) / np.maximum(np.abs(g), 1e-300)
    round_trip = float(np.max(rel))
    worst_quad = 0.0
    period = TWO_PI / params.modulation
    t = np.linspace(0.0, period, 20001)
    for eta_val in (0.2, 1.0, 1.8):
        phase = np.exp(
            1j * (params.detuning * t - eta_val * np.sin(params.modulation * t))
        )
        average = np.trapezoid(phase, t) / period
        worst_quad = max(worst_quad, abs(average.real - j1(eta_val)),
                         abs(average.imag))
    ok = round_trip < 1e-9 and worst_quad < 1e-4
    line = _verdict(
        8, ok,
        f"round trip {round_trip:.2e} < 1e-9 over 1000 samples; "
        f"sideband average off by {worst_quad:.2e} < 1e-4",
    )
    assert ok, line


def test_criterion_9_byte_identical_reruns(tmp_path):
    sim_cfg = tmp_path / "sim.yaml"
    sim_cfg.write_text(
        "protocol:\n  amplitude: 0.7365\n  duration: 3.0\n"
        "noise:\n  uniform: 0.0005\nrun:\n  steps: 1001\n"
    )
    scan_cfg = tmp_path / "scan.yaml"
    scan_cfg.write_text(
        "scan:\n  kind: decoherence\n  a_min: 0.5\n  a_max: 1.0\n  a_count: 3\n"
        "  x_count: 3\nrun:\n  steps: 401\n  jobs: 2\n"
    )
    identical = True
    compared = 0
    for name, cfg in (("sim", sim_cfg), ("scan", scan_cfg)):
        command = "simulate" if name == "sim" else "scan"
        out1 = tmp_path / f"{name}1"
        out2 = tmp_path / f"{name}2"
        assert cli.main([command, "--config", str(cfg), "--out", str(out1)]) == 0
        assert cli.main([command, "--config", str(cfg), "--out", str(out2)]) == 0
        for path in sorted(out1.iterdir()):
            twin = out2 / path.name
            compared += 1
            if path.read_bytes() != twin.read_bytes():
                identical = False
    ok = identical and compared >= 6
    line = _verdict(9, ok, f"{compared} files byte-identical across reruns: "
                           f"{identical}")
    assert ok, line
