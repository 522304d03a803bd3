# Copyright (C) 2026 The clockforge authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.
"""Tests for the full clock-space operators."""

# 3rd Party Libraries
import numpy as np

import pytest

from scipy import sparse

# Custom libraries
from clockforge.circuit_model import parse_circuit, random_circuit
from clockforge.clock_hamiltonian import (
    ClockOperator,
    analytic_ground_state,
    build_full_HB,
    build_full_hamiltonian_at,
    build_full_HI,
    build_full_HP,
    build_O_ell,
    clock_index,
    export_coo,
    gamma_basis,
    project_to_subspace,
    subspace_residual,
    success_probability,
    write_coo,
)
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.reduced_model import (
    Schedule,
    build_HB_reduced,
    build_HI_reduced,
    build_HP_reduced,
    hamiltonian_at,
)


def test_clock_index_is_unary():
    assert clock_index(0, 3) == 0
    assert clock_index(1, 3) == 0b100
    assert clock_index(2, 3) == 0b110
    assert clock_index(3, 3) == 0b111
    with pytest.raises(ConfigError):
        clock_index(4, 3)


def test_beginning_hamiltonian_counts_legal_clock_steps():
    op = build_full_HB(2, 3)
    assert op.dim == 32
    assert op.to_dense().trace().real == pytest.approx(4 * 3)


def test_problem_hamiltonian_is_the_sum_of_gate_operators(bell_circuit):
    total = build_O_ell(bell_circuit, 1, 4.0) + build_O_ell(bell_circuit, 2, 4.0)
    assert build_full_HP(bell_circuit, 4.0) == total


def test_projections_match_the_reduced_model(bell_circuit):
    basis = gamma_basis(bell_circuit)
    L = bell_circuit.L
    np.testing.assert_allclose(basis.gram(), np.eye(L + 1), atol=1e-14)

    projected = project_to_subspace(build_full_HB(2, L), basis)
    assert projected.allclose(build_HB_reduced(L))
    projected = project_to_subspace(build_full_HP(bell_circuit, 4.0), basis)
    assert projected.allclose(build_HP_reduced(L, 4.0))
    for t in (0.0, 20.0, 80.0):
        full = build_full_HI(bell_circuit, 4.0, 40.0, t)
        projected = project_to_subspace(full, basis)
        assert projected.allclose(build_HI_reduced(L, 4.0, 40.0, t))


def test_random_circuits_project_exactly(rng):
    tau = 40.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        circuit = random_circuit(n, int(rng.integers(1, 7)), rng)
        L = circuit.L
        basis = gamma_basis(circuit)

        hb = build_full_HB(n, L)
        assert project_to_subspace(hb, basis).allclose(build_HB_reduced(L))
        hp = build_full_HP(circuit, 4.0)
        assert project_to_subspace(hp, basis).allclose(build_HP_reduced(L, 4.0))
        assert subspace_residual(hp, basis) < 1e-12
        for t in (0.0, 0.5 * L * tau, L * tau):
            hi = build_full_HI(circuit, 4.0, tau, t)
            reduced = build_HI_reduced(L, 4.0, tau, t)
            assert project_to_subspace(hi, basis).allclose(reduced)
            assert subspace_residual(hi, basis) < 1e-12


def test_history_subspace_is_invariant(bell_circuit):
    basis = gamma_basis(bell_circuit)
    for op in (
        build_full_HB(2, 2),
        build_full_HP(bell_circuit, 4.0),
        build_full_HI(bell_circuit, 4.0, 40.0, 40.0),
    ):
        assert subspace_residual(op, basis) < 1e-12


def test_analytic_ground_state_is_a_null_vector(bell_circuit):
    coefficients = analytic_ground_state(bell_circuit.L, 4.0)
    assert np.linalg.norm(coefficients) == pytest.approx(1.0)
    vector = gamma_basis(bell_circuit).embed(coefficients)
    assert np.linalg.norm(build_full_HP(bell_circuit, 4.0).apply(vector)) < 1e-12


def test_basis_coefficients_invert_embedding(bell_circuit):
    basis = gamma_basis(bell_circuit)
    coefficients = np.array([0.5, 0.5j, -0.5 + 0.5j])
    roundtrip = basis.coefficients(basis.embed(coefficients))
    np.testing.assert_allclose(roundtrip, coefficients)


def test_success_probability():
    assert success_probability(1, 2.0) == pytest.approx(0.8)
    assert success_probability(20, 4.0) == pytest.approx(0.9375, abs=1e-12)
    assert success_probability(10 ** 4, 4.0) == pytest.approx(0.9375)


def test_schedule_lift_projects_to_the_reduced_schedule(bell_circuit):
    schedule = Schedule("composite_three_stage", 2, 4.0, tau=10.0, T1=5.0, T3=5.0)
    basis = gamma_basis(bell_circuit)
    for t in (0.0, 2.5, 5.0, 12.0, 25.0, 27.5, 30.0):
        full = build_full_hamiltonian_at(schedule, bell_circuit, t)
        assert project_to_subspace(full, basis).allclose(hamiltonian_at(schedule, t))


def test_schedule_lift_checks_the_clock_length(bell_circuit):
    with pytest.raises(ConfigError):
        build_full_hamiltonian_at(Schedule("naive", 3, 4.0), bell_circuit, 0.0)


def test_operators_must_be_hermitian():
    with pytest.raises(NumericalError):
        ClockOperator(sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]])), 1, 0)


def test_clock_space_cap():
    circuit = parse_circuit("qubits 20\n" + "gate X 0\n" * 3)
    with pytest.raises(ConfigError, match="cap"):
        build_full_HP(circuit, 4.0)


def test_projection_rejects_foreign_basis(bell_circuit):
    other = parse_circuit("qubits 1\ngate H 0\ngate X 0\n")
    with pytest.raises(ConfigError):
        project_to_subspace(build_full_HP(other, 4.0), gamma_basis(bell_circuit))


def test_coordinate_export(tmp_path, bell_circuit):
    op = build_full_HP(bell_circuit, 4.0)
    text = export_coo(op)
    lines = text.strip().splitlines()
    assert len(lines) == op.matrix.nnz
    first = lines[0].split()
    assert len(first) == 4
    rows, cols, _ = op.entries
    assert (int(first[0]), int(first[1])) == (rows[0], cols[0])

    path = tmp_path / "hp.coo"
    write_coo(op, str(path))
    assert path.read_text() == text
