"""Robustness-scan and qubit-count-sweep tests.

Grids here are deliberately small; the full-resolution behavior is covered
by the acceptance suite.
"""

import numpy as np
import pytest

from darkpath import dynamics, scans
from darkpath.model import ErrorModel
from darkpath.pulse_design import ProtocolKind, ProtocolSpec


def _template():
    return ProtocolSpec(kind=ProtocolKind.QST, n_qubits=3, source=1, target=3,
                        amplitude=1.0, duration=1.0)


def test_scan_grid_validates_shapes():
    with pytest.raises(ValueError):
        scans.ScanGrid("x", [0.0, 1.0], "y", [0.0], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        scans.ScanGrid("x", [0.0, 1.0], "y", [0.0], np.array([[0.5, 1.5]]))
    grid = scans.ScanGrid("x", [0.0, 1.0], "y", [0.0], np.array([[0.25, 1.0]]))
    assert grid.fidelities.shape == (1, 2)


def test_invalid_grids_rejected():
    template = _template()
    with pytest.raises(ValueError):
        scans.scan_x_error(template, [], [0.0])
    with pytest.raises(ValueError):
        scans.scan_x_error(template, [[0.4, 0.6]], [0.0])
    with pytest.raises(ValueError):
        scans.scan_decoherence(template, [0.7], [-1e-4])
    with pytest.raises(ValueError):
        scans.scan_decoherence(template, [0.7], [1e-4], mode="inverted")


def test_zero_error_column_is_the_baseline():
    # The eps = 0 column must reproduce a direct minimal-time propagation
    # through the same code path.
    template = _template()
    amplitudes = np.array([0.5, 0.9])
    grid = scans.scan_x_error(template, amplitudes, [-0.05, 0.0], steps=801)
    assert grid.x_name == "epsilon" and grid.y_name == "amplitude"
    col = grid.column(0.0)
    from dataclasses import replace

    from darkpath.optimize import dimensionless_peak

    for a, value in zip(amplitudes, col):
        spec = replace(template, amplitude=float(a),
                       duration=dimensionless_peak(template, float(a)))
        direct = dynamics.propagate_schrodinger(spec, steps=801)
        assert abs(value - direct.fidelity) < 1e-9
        assert value > 0.9999


def test_coupling_rescale_equals_epsilon_error():
    # (1+eps) H is the same operator whether the error model scales it or the
    # schedule itself is rescaled before assembly.
    from darkpath import model, pulse_design
    from darkpath.dynamics import propagate_state_half_grid

    template = _template()
    eps = 0.07
    spec = ProtocolSpec(kind=ProtocolKind.QST, n_qubits=3, source=1, target=3,
                        amplitude=0.8, duration=3.0)
    steps = 601
    via_error = dynamics.propagate_schrodinger(spec, ErrorModel(epsilon=eps),
                                               steps=steps)
    grid_times = np.linspace(0.0, spec.duration, 2 * steps + 1)
    rows = pulse_design.coupling_matrix(spec, grid_times) * (1.0 + eps)
    h_half = model.hamiltonians(rows)
    psi0 = pulse_design.dark_state(spec, 0.0)
    target = pulse_design.dark_state(spec, spec.duration)
    via_schedule = propagate_state_half_grid(h_half, psi0, spec.duration, target,
                                             False)
    assert abs(via_error.fidelity - via_schedule.fidelity) < 1e-12


def test_z_error_columns_symmetric_for_the_shift_magnitude():
    template = _template()
    grid = scans.scan_z_error(template, [0.6], [-0.08, 0.0, 0.08], steps=801)
    # a static level shift enters only through its magnitude here
    assert grid.fidelities[0, 0] == pytest.approx(grid.fidelities[0, 2], abs=1e-9)
    assert grid.fidelities[0, 1] > grid.fidelities[0, 0]


def test_decoherence_modes_differ_only_through_the_bus():
    template = _template()
    uni = scans.scan_decoherence(template, [1.2], [5e-4], mode="uniform",
                                 steps=801)
    fixed = scans.scan_decoherence(template, [1.2], [5e-4], mode="bus-fixed",
                                   steps=801)
    assert fixed.fidelities[0, 0] < uni.fidelities[0, 0]
    assert fixed.metadata["mode"] == "bus-fixed"
    # at the pinned bus rate the two modes coincide
    uni_pin = scans.scan_decoherence(template, [1.2], [1e-3], mode="uniform",
                                     steps=801)
    fixed_pin = scans.scan_decoherence(template, [1.2], [1e-3], mode="bus-fixed",
                                       steps=801)
    assert fixed_pin.fidelities[0, 0] == pytest.approx(
        uni_pin.fidelities[0, 0], abs=1e-12
    )


def test_parallel_assembly_is_deterministic():
    template = _template()
    amplitudes = [0.5, 0.8, 1.1]
    epsilons = [-0.1, 0.0, 0.1]
    serial = scans.scan_x_error(template, amplitudes, epsilons, steps=401,
                                n_jobs=1)
    parallel = scans.scan_x_error(template, amplitudes, epsilons, steps=401,
                                  n_jobs=3)
    assert np.array_equal(serial.fidelities, parallel.fidelities)


def test_scan_metadata_records_the_search():
    template = _template()
    grid = scans.scan_x_error(template, [0.7], [0.0], steps=401)
    assert grid.metadata["scan"] == "x_error"
    assert grid.metadata["steps"] == 401
    assert grid.metadata["protocol"]["kind"] == "qst"
    assert "amplitude" not in grid.metadata["protocol"]


def test_sweep_qubit_count_validation():
    with pytest.raises(ValueError):
        scans.sweep_qubit_count([])
    with pytest.raises(ValueError):
        scans.sweep_qubit_count([2, 3])
    with pytest.raises(ValueError):
        scans.sweep_qubit_count([3], target_coupling=0.0)


def test_sweep_fidelity_drops_with_register_size():
    rows = scans.sweep_qubit_count([3, 4, 5], physical=False, n_jobs=1)
    assert rows.shape == (3, 2)
    assert np.array_equal(rows[:, 0], [3.0, 4.0, 5.0])
    assert rows[0, 1] > rows[1, 1] > rows[2, 1]
    assert np.all((rows[:, 1] >= 0.0) & (rows[:, 1] <= 1.0))
