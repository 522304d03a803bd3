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
"""Quantum circuits: gate table, circuit file format and state-vector execution."""

# Built in Libraries
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

# 3rd Party Libraries
import numpy as np

from scipy import sparse

# Custom libraries
from clockforge.exceptions import ConfigError

logger = logging.getLogger(__name__)

MAX_QUBITS = 24
UNITARY_TOL = 1e-12

_SQRT_HALF = 1.0 / np.sqrt(2.0)

NAMED_GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(0.25j * np.pi)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}


@dataclass(frozen=True, eq=False)
class Gate:
    """
    A unitary acting on one or two qubits.

    Attributes
    ----------
    label : str
        Gate name, either a key of ``NAMED_GATES`` or a custom label.
    targets : Tuple[int, ...]
        Target qubits. The first target is the most significant bit of the
        gate matrix index.
    matrix : np.ndarray
        Complex ``2**arity x 2**arity`` unitary, stored read-only.
    """

    label: str
    targets: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        targets = tuple(int(t) for t in self.targets)
        matrix = np.array(self.matrix, dtype=complex)
        arity = len(targets)

        if arity not in (1, 2):
            err_str = f"Gate {self.label} must act on 1 or 2 qubits, got {arity}."
            raise ConfigError(err_str)
        if len(set(targets)) != arity:
            raise ConfigError(f"Gate {self.label} has repeated targets {targets}.")
        if min(targets) < 0:
            raise ConfigError(f"Gate {self.label} has a negative target index.")
        if matrix.shape != (2 ** arity, 2 ** arity):
            err_str = (
                f"Gate {self.label} on {arity} qubit(s) needs a "
                f"{2 ** arity}x{2 ** arity} matrix, got {matrix.shape}."
            )
            raise ConfigError(err_str)

        deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(2 ** arity)))
        if deviation > UNITARY_TOL:
            err_str = (
                f"Gate {self.label} is not unitary: max |U^H U - I| = {deviation:.3e}."
            )
            raise ConfigError(err_str)

        matrix.setflags(write=False)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "matrix", matrix)

    @property
    def arity(self) -> int:
        """Getter for the number of qubits the gate acts on."""
        return len(self.targets)

    @property
    def is_named(self) -> bool:
        """Check whether the gate is an unmodified entry of the built-in table."""
        named = NAMED_GATES.get(self.label)
        return named is not None and np.array_equal(named, self.matrix)


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    """
    An n-qubit circuit: an ordered list of L gates and a basis initial state.

    Attributes
    ----------
    n : int
        Number of computational qubits.
    gates : Tuple[Gate, ...]
        The gates U_1 ... U_L in application order.
    initial_state : str
        Bitstring of length n, qubit 0 first. Defaults to all zeros.
    """

    n: int
    gates: Tuple[Gate, ...]
    initial_state: Optional[str] = None

    def __post_init__(self) -> None:
        n = int(self.n)
        gates = tuple(self.gates)
        if n < 1:
            raise ConfigError(f"A circuit needs at least one qubit, got n={n}.")
        if len(gates) < 1:
            raise ConfigError("A circuit needs at least one gate.")

        for index, gate in enumerate(gates, start=1):
            if max(gate.targets) >= n:
                err_str = (
                    f"Gate {index} ({gate.label}) targets {gate.targets} "
                    f"but the circuit only has {n} qubit(s)."
                )
                raise ConfigError(err_str)

        initial_state = self.initial_state
        if initial_state is None:
            initial_state = "0" * n
        if len(initial_state) != n or set(initial_state) - {"0", "1"}:
            err_str = f"Initial state must be a bitstring of length {n}."
            raise ConfigError(err_str)

        object.__setattr__(self, "n", n)
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "initial_state", initial_state)

    @property
    def L(self) -> int:
        """Getter for the number of gates."""
        return len(self.gates)

    @property
    def initial_index(self) -> int:
        """Getter for the basis index of the initial state."""
        return int(self.initial_state, 2)


def parse_circuit(text: str) -> CircuitSpec:
    """
    Parse the circuit file format into a validated CircuitSpec.

    One directive per line::

        qubits <n>
        init <bitstring>
        gate <NAME> <t0> [t1]
        ugate <label> <t0> [t1] <re,im> <re,im> ...

    Lines starting with ``#`` and blank lines are ignored.

    Parameters
    ----------
    text : str
        Circuit file content.

    Returns
    -------
    CircuitSpec
        The parsed circuit with every gate matrix materialized.
    """
    n = None
    initial_state = None
    gates = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        tokens = line.split()
        directive = tokens[0].lower()
        try:
            if directive == "qubits":
                if len(tokens) != 2:
                    raise ConfigError("expected 'qubits <n>'")
                n = _parse_int(tokens[1], "qubit count")
            elif directive == "init":
                if len(tokens) != 2:
                    raise ConfigError("expected 'init <bitstring>'")
                initial_state = tokens[1]
            elif directive == "gate":
                gates.append(_parse_named_gate(tokens[1:]))
            elif directive == "ugate":
                gates.append(_parse_custom_gate(tokens[1:]))
            else:
                raise ConfigError(f"unknown directive '{tokens[0]}'")
        except ConfigError as err:
            raise ConfigError(f"Circuit line {line_no}: {err}") from err

    if n is None:
        raise ConfigError("Circuit is missing the 'qubits <n>' directive.")

    circuit = CircuitSpec(n=n, gates=tuple(gates), initial_state=initial_state)
    logger.debug("Parsed circuit with n=%d, L=%d", circuit.n, circuit.L)
    return circuit


def load_circuit(path: str) -> CircuitSpec:
    """Read and parse a circuit file."""
    try:
        with open(path, "r", encoding="utf-8") as fd:
            text = fd.read()
    except OSError as err:
        raise ConfigError(f"Cannot read circuit file {path}: {err}") from err
    return parse_circuit(text)


def _parse_int(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got '{token}'") from None


def _parse_named_gate(tokens: Sequence[str]) -> Gate:
    if len(tokens) < 2:
        raise ConfigError("expected 'gate <NAME> <t0> [t1]'")
    name = tokens[0].upper()
    if name not in NAMED_GATES:
        known = ", ".join(NAMED_GATES)
        raise ConfigError(f"unknown gate '{tokens[0]}' (known gates: {known})")

    matrix = NAMED_GATES[name]
    arity = int(np.log2(matrix.shape[0]))
    if len(tokens) - 1 != arity:
        raise ConfigError(f"gate {name} takes {arity} target(s)")
    targets = tuple(_parse_int(t, "target") for t in tokens[1:])
    return Gate(label=name, targets=targets, matrix=matrix)


def _parse_custom_gate(tokens: Sequence[str]) -> Gate:
    if len(tokens) < 3:
        raise ConfigError("expected 'ugate <label> <t0> [t1] <re,im> ...'")
    label = tokens[0]

    # Targets run until the first matrix entry, which always contains a comma.
    targets = []
    position = 1
    while position < len(tokens) and "," not in tokens[position]:
        targets.append(_parse_int(tokens[position], "target"))
        position += 1

    entries = []
    for token in tokens[position:]:
        try:
            re_part, im_part = token.split(",")
            entries.append(complex(float(re_part), float(im_part)))
        except ValueError:
            raise ConfigError(f"malformed matrix entry '{token}'") from None

    size = 2 ** len(targets)
    if len(entries) != size * size:
        err_str = (
            f"ugate {label} on {len(targets)} qubit(s) needs {size * size} "
            f"entries, got {len(entries)}"
        )
        raise ConfigError(err_str)

    matrix = np.array(entries, dtype=complex).reshape(size, size)
    return Gate(label=label, targets=tuple(targets), matrix=matrix)


def format_circuit(circuit: CircuitSpec) -> str:
    """Render a circuit in the text format accepted by parse_circuit."""
    lines = [f"qubits {circuit.n}", f"init {circuit.initial_state}"]
    for gate in circuit.gates:
        targets = " ".join(str(t) for t in gate.targets)
        if gate.is_named:
            lines.append(f"gate {gate.label} {targets}")
        else:
            entries = " ".join(
                f"{float(value.real)!r},{float(value.imag)!r}"
                for value in gate.matrix.ravel()
            )
            lines.append(f"ugate {gate.label} {targets} {entries}")
    return "\n".join(lines) + "\n"


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """
    Apply a gate to an n-qubit state vector.

    The state is viewed as an n-index tensor and contracted with the gate
    tensor on the target axes, so no 2^n x 2^n matrix is ever formed.

    Parameters
    ----------
    state : np.ndarray
        Complex vector of length 2**n.
    gate : Gate
        Gate whose targets are all < n.
    n : int
        Qubit count.

    Returns
    -------
    np.ndarray
        New state vector; the input is left untouched.
    """
    arity = gate.arity
    tensor = state.reshape((2,) * n)
    gate_tensor = gate.matrix.reshape((2,) * (2 * arity))
    out = np.tensordot(
        gate_tensor, tensor, axes=(list(range(arity, 2 * arity)), list(gate.targets))
    )
    out = np.moveaxis(out, list(range(arity)), list(gate.targets))
    return np.ascontiguousarray(out).reshape(-1)


def basis_state(n: int, index: int) -> np.ndarray:
    """Return the computational basis vector |index> on n qubits."""
    state = np.zeros(2 ** n, dtype=complex)
    state[index] = 1.0
    return state


def run_circuit(circuit: CircuitSpec) -> List[np.ndarray]:
    """
    Execute a circuit and return every intermediate state.

    Parameters
    ----------
    circuit : CircuitSpec
        Circuit with n <= MAX_QUBITS.

    Returns
    -------
    List[np.ndarray]
        ``[alpha_0, ..., alpha_L]`` where alpha_0 is the initial basis state
        and alpha_l = U_l alpha_(l-1).
    """
    if circuit.n > MAX_QUBITS:
        err_str = f"Circuit has n={circuit.n} qubits; the cap is {MAX_QUBITS}."
        raise ConfigError(err_str)

    states = [basis_state(circuit.n, circuit.initial_index)]
    for gate in circuit.gates:
        states.append(apply_gate(states[-1], gate, circuit.n))
    return states


def final_probabilities(circuit: CircuitSpec) -> np.ndarray:
    """Return the computational-basis probabilities of the final circuit state."""
    return np.abs(run_circuit(circuit)[-1]) ** 2


def embed_gate(gate: Gate, n: int) -> sparse.csr_matrix:
    """
    Build the sparse 2^n x 2^n matrix of a gate tensored with identity.

    Parameters
    ----------
    gate : Gate
        The gate to embed.
    n : int
        Total qubit count; qubit 0 is the most significant bit.

    Returns
    -------
    scipy.sparse.csr_matrix
        Canonical (sorted, duplicate-free) sparse matrix.
    """
    dim = 2 ** n
    arity = gate.arity
    columns = np.arange(dim)
    shifts = [n - 1 - q for q in gate.targets]

    sub_in = np.zeros(dim, dtype=np.int64)
    mask = 0
    for shift in shifts:
        sub_in = (sub_in << 1) | ((columns >> shift) & 1)
        mask |= 1 << shift
    base = columns & ~mask

    rows, cols, values = [], [], []
    for sub_out in range(2 ** arity):
        out_rows = base.copy()
        for position, shift in enumerate(shifts):
            bit = (sub_out >> (arity - 1 - position)) & 1
            out_rows |= bit << shift
        entries = gate.matrix[sub_out, sub_in]
        keep = entries != 0
        rows.append(out_rows[keep])
        cols.append(columns[keep])
        values.append(entries[keep])

    matrix = sparse.csr_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def random_unitary(size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a Haar-random unitary by QR decomposition of a Ginibre matrix."""
    ginibre = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    q, r = np.linalg.qr(ginibre)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_circuit(n: int, L: int, rng: np.random.Generator) -> CircuitSpec:
    """
    Draw a random circuit of L gates on n qubits.

    Gates are taken from the named table or are Haar-random single-qubit
    unitaries; two-qubit gates are only drawn when n >= 2.
    """
    single = ["X", "Y", "Z", "H", "S", "T"]
    double = ["CNOT", "CZ"]

    gates = []
    for _ in range(L):
        choice = rng.integers(3) if n >= 2 else rng.integers(2)
        if choice == 0:
            name = single[rng.integers(len(single))]
            gates.append(Gate(name, (int(rng.integers(n)),), NAMED_GATES[name]))
        elif choice == 1:
            matrix = random_unitary(2, rng)
            gates.append(Gate("U", (int(rng.integers(n)),), matrix))
        else:
            name = double[rng.integers(len(double))]
            targets = tuple(int(t) for t in rng.choice(n, size=2, replace=False))
            gates.append(Gate(name, targets, NAMED_GATES[name]))

    bits = "".join(str(b) for b in rng.integers(2, size=n))
    return CircuitSpec(n=n, gates=tuple(gates), initial_state=bits)
