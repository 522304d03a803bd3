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
"""Tests for the circuit model."""

# 3rd Party Libraries
import numpy as np

import pytest

# Custom libraries
from clockforge.circuit_model import (
    NAMED_GATES,
    CircuitSpec,
    Gate,
    apply_gate,
    basis_state,
    embed_gate,
    final_probabilities,
    format_circuit,
    parse_circuit,
    random_circuit,
    run_circuit,
)
from clockforge.exceptions import ConfigError


def test_bell_circuit_final_state(bell_circuit):
    states = run_circuit(bell_circuit)
    assert len(states) == bell_circuit.L + 1 == 3
    expected = np.array([1, 0, 0, 1]) / np.sqrt(2.0)
    np.testing.assert_allclose(states[-1], expected, atol=1e-15)
    np.testing.assert_allclose(final_probabilities(bell_circuit), [0.5, 0, 0, 0.5])


def test_qubit_zero_is_most_significant():
    circuit = parse_circuit("qubits 2\ngate X 0\n")
    np.testing.assert_array_equal(run_circuit(circuit)[-1], basis_state(2, 2))


def test_initial_state_bitstring():
    circuit = parse_circuit("qubits 3\ninit 101\ngate X 1\n")
    assert circuit.initial_index == 5
    np.testing.assert_array_equal(run_circuit(circuit)[-1], basis_state(3, 7))


def test_cnot_control_is_first_target():
    circuit = parse_circuit("qubits 2\ninit 01\ngate CNOT 1 0\n")
    np.testing.assert_array_equal(run_circuit(circuit)[-1], basis_state(2, 3))


def test_custom_gate_parses_complex_entries():
    text = "qubits 1\nugate phase 0 1,0 0,0 0,0 0,1\n"
    gate = parse_circuit(text).gates[0]
    assert gate.label == "phase"
    assert not gate.is_named
    np.testing.assert_array_equal(gate.matrix, NAMED_GATES["S"])


def test_comments_and_blank_lines_are_ignored():
    circuit = parse_circuit("# header\n\nqubits 1\n   # indented comment\ngate H 0\n")
    assert circuit.L == 1


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("gate X 0\n", "qubits"),
        ("qubits 1\ngate FOO 0\n", "unknown gate"),
        ("qubits 1\ngate X 1\n", "only has 1 qubit"),
        ("qubits 2\ngate CNOT 0\n", "takes 2 target"),
        ("qubits 2\ngate CNOT 1 1\n", "repeated targets"),
        ("qubits 1\nugate bad 0 1,0 0,0 0,0 2,0\n", "not unitary"),
        ("qubits 1\nugate bad 0 1,0 0,0 0,0\n", "needs 4 entries"),
        ("qubits 1\ninit 2\ngate X 0\n", "bitstring"),
        ("qubits 1\n", "at least one gate"),
        ("qubits x\n", "integer"),
        ("qubits 1\nmeasure 0\n", "unknown directive"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_circuit(text)


def test_parse_error_names_the_line():
    with pytest.raises(ConfigError, match="Circuit line 3"):
        parse_circuit("qubits 1\ngate X 0\ngate NOPE 0\n")


def test_format_circuit_reparses_to_the_same_circuit(rng):
    circuit = random_circuit(3, 6, rng)
    reparsed = parse_circuit(format_circuit(circuit))
    assert reparsed.initial_state == circuit.initial_state
    assert [g.targets for g in reparsed.gates] == [g.targets for g in circuit.gates]
    for ours, theirs in zip(reparsed.gates, circuit.gates):
        np.testing.assert_allclose(ours.matrix, theirs.matrix, atol=1e-15)


def test_apply_gate_matches_embedded_matrix(rng):
    circuit = random_circuit(3, 8, rng)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    for gate in circuit.gates:
        np.testing.assert_allclose(
            apply_gate(state, gate, 3), embed_gate(gate, 3) @ state, atol=1e-13
        )


def test_embed_gate_is_unitary_and_sparse():
    matrix = embed_gate(Gate("CNOT", (2, 0), NAMED_GATES["CNOT"]), 3)
    assert matrix.shape == (8, 8)
    assert matrix.nnz == 8
    dense = matrix.toarray()
    np.testing.assert_allclose(dense.conj().T @ dense, np.eye(8), atol=1e-15)


def test_random_circuit_is_deterministic_for_a_seed():
    first = random_circuit(2, 5, np.random.default_rng(3))
    second = random_circuit(2, 5, np.random.default_rng(3))
    assert format_circuit(first) == format_circuit(second)


def test_circuit_spec_rejects_out_of_range_targets():
    with pytest.raises(ConfigError):
        CircuitSpec(n=1, gates=(Gate("CZ", (0, 1), NAMED_GATES["CZ"]),))
