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
"""
Full clock-space operators and their projection onto circuit history states.

The computational register holds n qubits and the clock register L qubits in
unary encoding. A full-space basis index is ``x * 2**L + c`` where x is the
computational index and c the clock bitstring, clock bit 0 most significant.
These builders are the cross-validation oracle for ``reduced_model``.
"""

# Built in Libraries
import functools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

# 3rd Party Libraries
import numpy as np

import pandas as pd

from scipy import sparse

# Custom libraries
from clockforge.circuit_model import CircuitSpec, embed_gate, run_circuit
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.reduced_model import (
    Schedule,
    TridiagonalHamiltonian,
    moving_well_diagonal,
)

logger = logging.getLogger(__name__)

MAX_CLOCK_QUBITS = 22
PROJECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClockOperator:
    """
    A sparse Hermitian operator on the computational-plus-clock space.

    The matrix is stored in canonical CSR form (duplicates merged, indices
    sorted, explicit zeros dropped), so two operators are equal exactly when
    their stored entries are.

    Attributes
    ----------
    matrix : scipy.sparse.csr_matrix
        The operator, shape ``(2**(n+L), 2**(n+L))``.
    n : int
        Computational qubit count.
    L : int
        Clock length.
    eta : float, optional
        Bias parameter used to build the operator.
    label : str
        Provenance label.
    """

    matrix: sparse.csr_matrix
    n: int
    L: int
    eta: Optional[float] = None
    label: str = ""

    def __post_init__(self) -> None:
        matrix = sparse.csr_matrix(self.matrix, dtype=complex)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()

        dim = 2 ** (self.n + self.L)
        if matrix.shape != (dim, dim):
            err_str = (
                f"Operator {self.label!r} has shape {matrix.shape}; "
                f"expected ({dim}, {dim}) for n={self.n}, L={self.L}."
            )
            raise ConfigError(err_str)

        asymmetry = matrix - matrix.conj().T
        asymmetry.eliminate_zeros()
        if asymmetry.nnz:
            raise NumericalError(f"Operator {self.label!r} is not Hermitian.")

        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        """Getter for the full-space dimension 2^(n+L)."""
        return self.matrix.shape[0]

    @property
    def entries(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Getter for the stored entries as (rows, cols, values) in row-major order."""
        coo = self.matrix.tocoo()
        return coo.row, coo.col, coo.data

    def to_dense(self) -> np.ndarray:
        """Return the operator as a dense array."""
        return self.matrix.toarray()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Apply the operator to a full-space vector or block of column vectors."""
        return self.matrix @ vector

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClockOperator):
            return NotImplemented
        if self.matrix.shape != other.matrix.shape:
            return False
        difference = self.matrix != other.matrix
        return difference.nnz == 0

    def __add__(self, other: "ClockOperator") -> "ClockOperator":
        if not isinstance(other, ClockOperator):
            return NotImplemented
        if (self.n, self.L) != (other.n, other.L):
            raise ConfigError("Cannot add operators on different clock spaces.")
        eta = self.eta if self.eta == other.eta else None
        return ClockOperator(
            self.matrix + other.matrix,
            self.n,
            self.L,
            eta,
            f"{self.label}+{other.label}",
        )

    def __mul__(self, scalar: float) -> "ClockOperator":
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return ClockOperator(
            float(scalar) * self.matrix,
            self.n,
            self.L,
            self.eta,
            f"{float(scalar):g}*{self.label}",
        )

    __rmul__ = __mul__


def _check_cap(n: int, L: int) -> None:
    if n + L > MAX_CLOCK_QUBITS:
        err_str = (
            f"Clock space needs n+L={n + L} qubits; the cap is {MAX_CLOCK_QUBITS}."
        )
        raise ConfigError(err_str)


def _check_eta(eta: float) -> float:
    if not eta > 1.0:
        raise ConfigError(f"eta must be greater than 1, got {eta}.")
    return float(eta)


def clock_index(ell: int, L: int) -> int:
    """
    Return the clock bitstring index of step ell: ell ones followed by L-ell zeros.

    Examples
    --------
    >>> clock_index(2, 3)
    6
    """
    if not 0 <= ell <= L:
        raise ConfigError(f"Clock step {ell} is outside 0...{L}.")
    return ((1 << ell) - 1) << (L - ell)


def _block_rows(n: int, L: int, ell: int) -> np.ndarray:
    """Full-space indices of every computational state at clock step ell."""
    return np.arange(2 ** n, dtype=np.int64) * (2 ** L) + clock_index(ell, L)


def _diagonal_triples(n: int, L: int, ell: int, weight: float):
    rows = _block_rows(n, L, ell)
    return rows, rows, np.full(rows.size, weight, dtype=complex)


def _hopping_triples(circuit: CircuitSpec, ell: int, amplitude: float):
    """Entries of amplitude * (U_ell x |ell><ell-1| + h.c.)."""
    n, L = circuit.n, circuit.L
    unitary = embed_gate(circuit.gates[ell - 1], n).tocoo()
    rows = unitary.row.astype(np.int64) * (2 ** L) + clock_index(ell, L)
    cols = unitary.col.astype(np.int64) * (2 ** L) + clock_index(ell - 1, L)
    values = amplitude * unitary.data
    return (
        np.concatenate([rows, cols]),
        np.concatenate([cols, rows]),
        np.concatenate([values, np.conj(values)]),
    )


def _assemble(triples: List[tuple], n: int, L: int) -> sparse.csr_matrix:
    dim = 2 ** (n + L)
    if not triples:
        return sparse.csr_matrix((dim, dim), dtype=complex)
    rows = np.concatenate([t[0] for t in triples])
    cols = np.concatenate([t[1] for t in triples])
    values = np.concatenate([t[2] for t in triples])
    return sparse.coo_matrix((values, (rows, cols)), shape=(dim, dim)).tocsr()


def _o_ell_triples(circuit: CircuitSpec, ell: int, eta: float) -> List[tuple]:
    n, L = circuit.n, circuit.L
    return [
        _diagonal_triples(n, L, ell - 1, 0.5 * eta),
        _diagonal_triples(n, L, ell, 0.5 / eta),
        _hopping_triples(circuit, ell, -0.5),
    ]


def build_O_ell(circuit: CircuitSpec, ell: int, eta: float) -> ClockOperator:
    """
    Build the single-gate penalty operator O_ell.

    Parameters
    ----------
    circuit : CircuitSpec
        Source of the gate U_ell.
    ell : int
        Gate index, 1 <= ell <= L.
    eta : float
        Bias parameter, eta > 1.

    Returns
    -------
    ClockOperator
        ``(eta/2) I x |ell-1><ell-1| + 1/(2 eta) I x |ell><ell|`` minus half
        the hopping ``U_ell x |ell><ell-1|`` and its adjoint.
    """
    eta = _check_eta(eta)
    _check_cap(circuit.n, circuit.L)
    if not 1 <= ell <= circuit.L:
        raise ConfigError(f"Gate index {ell} is outside 1...{circuit.L}.")
    matrix = _assemble(_o_ell_triples(circuit, ell, eta), circuit.n, circuit.L)
    return ClockOperator(matrix, circuit.n, circuit.L, eta, f"O_{ell}")


def build_full_HB(n: int, L: int) -> ClockOperator:
    """Build the projector onto clock steps 1...L, identity on the data register."""
    _check_cap(n, L)
    triples = [_diagonal_triples(n, L, ell, 1.0) for ell in range(1, L + 1)]
    return ClockOperator(_assemble(triples, n, L), n, L, None, "HB")


def build_full_HP(circuit: CircuitSpec, eta: float) -> ClockOperator:
    """Build the problem Hamiltonian as the sum of O_1 ... O_L."""
    eta = _check_eta(eta)
    _check_cap(circuit.n, circuit.L)
    triples = []
    for ell in range(1, circuit.L + 1):
        triples.extend(_o_ell_triples(circuit, ell, eta))
    logger.debug("Assembled HP from %d gate operators", circuit.L)
    return ClockOperator(
        _assemble(triples, circuit.n, circuit.L), circuit.n, circuit.L, eta, "HP"
    )


def build_full_HI(
    circuit: CircuitSpec, eta: float, tau: float, t: float
) -> ClockOperator:
    """
    Lift the moving-well Hamiltonian H_I(t) to the full clock space.

    The diagonal weight of clock step m is the moving-well level d_m(t); the
    hopping terms are those of the problem Hamiltonian. The projection onto the
    history states reproduces ``build_HI_reduced`` exactly.
    """
    eta = _check_eta(eta)
    if not tau > 0.0:
        raise ConfigError(f"tau must be positive, got {tau}.")
    n, L = circuit.n, circuit.L
    _check_cap(n, L)

    levels = moving_well_diagonal(L, eta, tau, float(t))
    triples = [_diagonal_triples(n, L, m, levels[m]) for m in range(L + 1)]
    triples.extend(_hopping_triples(circuit, ell, -0.5) for ell in range(1, L + 1))
    return ClockOperator(_assemble(triples, n, L), n, L, eta, f"HI(t={t:g})")


@dataclass(frozen=True, eq=False)
class GammaBasis:
    """
    The circuit history states |alpha_ell> x |ell>^c, ell = 0...L.

    Attributes
    ----------
    circuit : CircuitSpec
        The circuit the basis was built from.
    alphas : Tuple[np.ndarray, ...]
        Intermediate circuit states alpha_0 ... alpha_L.
    """

    circuit: CircuitSpec
    alphas: Tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        """Getter for the number of basis vectors L+1."""
        return len(self.alphas)

    @property
    def dim(self) -> int:
        """Getter for the full-space dimension."""
        return 2 ** (self.circuit.n + self.circuit.L)

    @property
    def clock_indices(self) -> List[int]:
        """Getter for the clock bitstring index of every step."""
        return [clock_index(ell, self.circuit.L) for ell in range(self.size)]

    def as_sparse(self) -> sparse.csc_matrix:
        """Return the basis as a sparse ``dim x (L+1)`` matrix V of column vectors."""
        n, L = self.circuit.n, self.circuit.L
        rows, cols, values = [], [], []
        for ell, alpha in enumerate(self.alphas):
            support = np.flatnonzero(alpha)
            rows.append(support.astype(np.int64) * (2 ** L) + clock_index(ell, L))
            cols.append(np.full(support.size, ell))
            values.append(alpha[support])
        return sparse.csc_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.dim, self.size),
        )

    @property
    def vectors(self) -> List[np.ndarray]:
        """Getter for the basis as a list of dense full-space vectors."""
        dense = self.as_sparse().toarray()
        return [dense[:, ell] for ell in range(self.size)]

    def gram(self) -> np.ndarray:
        """Return the Gram matrix V^H V."""
        basis = self.as_sparse()
        return (basis.conj().T @ basis).toarray()

    def embed(self, coefficients: np.ndarray) -> np.ndarray:
        """Map reduced coefficients c_ell to the vector sum c_ell |gamma_ell>."""
        return self.as_sparse() @ np.asarray(coefficients, dtype=complex)

    def coefficients(self, vector: np.ndarray) -> np.ndarray:
        """Project a full-space vector onto the basis, returning <gamma_ell|vector>."""
        return self.as_sparse().conj().T @ vector


def gamma_basis(circuit: CircuitSpec) -> GammaBasis:
    """Build the L+1 history states of a circuit."""
    _check_cap(circuit.n, circuit.L)
    return GammaBasis(circuit=circuit, alphas=tuple(run_circuit(circuit)))


def _check_compatible(op: ClockOperator, basis: GammaBasis) -> None:
    if (op.n, op.L) != (basis.circuit.n, basis.circuit.L):
        err_str = (
            f"Operator {op.label!r} lives on n={op.n}, L={op.L} but the basis "
            f"has n={basis.circuit.n}, L={basis.circuit.L}."
        )
        raise ConfigError(err_str)


def project_to_subspace(op: ClockOperator, basis: GammaBasis) -> TridiagonalHamiltonian:
    """
    Restrict an operator to the history-state subspace.

    Parameters
    ----------
    op : ClockOperator
        Operator on the same clock space as the basis.
    basis : GammaBasis
        History states of the circuit.

    Returns
    -------
    TridiagonalHamiltonian
        The matrix ``<gamma_j|op|gamma_k>``.

    Raises
    ------
    NumericalError
        If the projected matrix is not real symmetric tridiagonal to 1e-12,
        which means the operator was built wrongly.
    """
    _check_compatible(op, basis)
    vectors = basis.as_sparse()
    projected = (vectors.conj().T @ (op.matrix @ vectors)).toarray()

    imaginary = np.max(np.abs(projected.imag))
    asymmetry = np.max(np.abs(projected - projected.T))
    band = np.triu(np.tril(np.ones_like(projected.real), 1), -1).astype(bool)
    residue = np.max(np.abs(projected[~band]), initial=0.0)
    worst = max(imaginary, asymmetry, residue)
    if worst > PROJECTION_TOL:
        err_str = (
            f"Projection of {op.label!r} is not real symmetric tridiagonal "
            f"(imag {imaginary:.2e}, asymmetry {asymmetry:.2e}, "
            f"off-band {residue:.2e})."
        )
        raise NumericalError(err_str)

    real = projected.real
    offdiag = 0.5 * (np.diag(real, 1) + np.diag(real, -1))
    return TridiagonalHamiltonian(np.diag(real).copy(), offdiag, op.eta, op.label)


def subspace_residual(op: ClockOperator, basis: GammaBasis) -> float:
    """
    Measure how far an operator maps history states out of their span.

    Returns
    -------
    float
        ``max_ell || op|gamma_ell> - V V^H op|gamma_ell> ||``.
    """
    _check_compatible(op, basis)
    vectors = basis.as_sparse()
    adjoint = vectors.conj().T
    worst = 0.0
    for ell in range(basis.size):
        image = op.matrix @ vectors[:, ell].toarray().ravel()
        inside = vectors @ (adjoint @ image)
        worst = max(worst, float(np.linalg.norm(image - inside)))
    return worst


def analytic_ground_state(L: int, eta: float) -> np.ndarray:
    """
    Return the zero-energy ground state of the reduced problem Hamiltonian.

    The coefficients are proportional to eta**ell. They are evaluated as
    eta**(ell - L) before normalization so large L never overflows.

    Examples
    --------
    >>> np.round(analytic_ground_state(1, 2.0), 4)
    array([0.4472, 0.8944])
    """
    eta = _check_eta(eta)
    if L < 1:
        raise ConfigError(f"L must be >= 1, got {L}.")
    coefficients = eta ** (np.arange(L + 1, dtype=float) - L)
    return coefficients / np.linalg.norm(coefficients)


def success_probability(L: int, eta: float) -> float:
    """
    Probability of finding the final history state in the ground state.

    Evaluates ``(eta^(2L+2) - eta^(2L)) / (eta^(2L+2) - 1)`` in the
    overflow-free form ``(1 - eta^-2) / (1 - eta^-(2L+2))``.
    """
    eta = _check_eta(eta)
    return (1.0 - eta ** -2.0) / (1.0 - eta ** (-(2.0 * L + 2.0)))


def export_coo(op: ClockOperator) -> str:
    """Render the stored entries as ``i j re im`` lines sorted by (i, j)."""
    rows, cols, values = op.entries
    df = pd.DataFrame({"i": rows, "j": cols, "re": values.real, "im": values.imag})
    return df.to_csv(sep=" ", header=False, index=False, float_format="%.17g")


def write_coo(op: ClockOperator, path: str) -> None:
    """Write ``export_coo(op)`` to a file."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(export_coo(op))


@functools.lru_cache(maxsize=16)
def _static_component(
    circuit: CircuitSpec, component: str, eta: float
) -> ClockOperator:
    if component == "HB":
        return build_full_HB(circuit.n, circuit.L)
    return build_full_HP(circuit, eta)


def build_full_hamiltonian_at(
    schedule: Schedule, circuit: CircuitSpec, t: float
) -> ClockOperator:
    """
    Evaluate a schedule at time t on the full clock space.

    Uses the same weighted decomposition as ``reduced_model.hamiltonian_at``,
    so its projection equals the reduced Hamiltonian at every t.
    """
    if schedule.L != circuit.L:
        err_str = f"Schedule has L={schedule.L} but the circuit has L={circuit.L}."
        raise ConfigError(err_str)

    dim = 2 ** (circuit.n + circuit.L)
    total = sparse.csr_matrix((dim, dim), dtype=complex)
    for weight, component, t_param in schedule.terms_at(t):
        if weight == 0.0:
            continue
        if component == "HI":
            op = build_full_HI(circuit, schedule.eta, schedule.tau, t_param)
        else:
            op = _static_component(circuit, component, schedule.eta)
        total = total + weight * op.matrix
    label = f"{schedule.kind}(t={t:g})"
    return ClockOperator(total, circuit.n, circuit.L, schedule.eta, label)
