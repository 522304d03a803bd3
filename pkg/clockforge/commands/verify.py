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
"""verify: full clock-space operators checked against the reduced model."""

# Built in Libraries
import math
import os

# 3rd Party Libraries
import numpy as np

import pandas as pd

# Custom libraries
from clockforge.circuit_model import load_circuit, random_circuit
from clockforge.clock_hamiltonian import (
    analytic_ground_state,
    build_full_HB,
    build_full_HI,
    build_full_HP,
    export_coo,
    gamma_basis,
    project_to_subspace,
    subspace_residual,
)
from clockforge.command_factory import CommandFactory
from clockforge.config_utilities import bundled_circuit_path
from clockforge.exceptions import NumericalError
from clockforge.reduced_model import (
    build_HB_reduced,
    build_HI_reduced,
    build_HP_reduced,
)
from clockforge.spectral import gershgorin_bounds, lowest_eigenvalues

MATCH_TOL = 1e-12
NULL_TOL = 1e-10
RANDOM_QUBITS = 2
RANDOM_MAX_GATES = 6

# Initialization of the command factory, used for making the command class
factory = CommandFactory(
    "verify", help="Check full-space clock operators against the reduced model."
)
factory.add_argument(
    "--circuit", default=None, help="Circuit file (default: bundled Bell circuit)."
)
factory.add_argument(
    "--random", type=int, default=0, help="Also check N random 2-qubit circuits."
)
factory.add_argument("--eta", type=float, default=4.0, help="Bias parameter, > 1.")
factory.add_argument("--tau", type=float, default=40.0, help="Time per site.")
factory.add_argument(
    "--export-coo",
    action="store_true",
    default=False,
    help="Write the first circuit's problem Hamiltonian as a coordinate list.",
)


@factory.initialize_command
def init(config, user_data, logger):
    """Load the circuit file and draw the random circuits."""
    path = config["circuit"] or bundled_circuit_path()
    user_data.circuits = [(os.path.basename(path), load_circuit(path))]

    if config["random"] > 0:
        seed = config["seed"]
        if seed is None:
            logger.display_warn_msg("No --seed given for random circuits, using 0")
            seed = 0
        rng = np.random.default_rng(seed)
        for index in range(config["random"]):
            L = int(rng.integers(1, RANDOM_MAX_GATES + 1))
            circuit = random_circuit(RANDOM_QUBITS, L, rng)
            user_data.circuits.append((f"random-{index + 1:03d}", circuit))

    logger.display_info_msg(f"Verifying {len(user_data.circuits)} circuit(s)")
    return True


def _band_distance(projected, reduced) -> float:
    return float(
        max(
            np.max(np.abs(projected.diag - reduced.diag)),
            np.max(np.abs(projected.offdiag - reduced.offdiag), initial=0.0),
        )
    )


def _outside_discs(h) -> float:
    """Largest distance of an eigenvalue from the union of the Gershgorin discs."""
    discs = gershgorin_bounds(h)
    worst = 0.0
    for value in lowest_eigenvalues(h, h.size):
        distance = min(
            max(abs(value - center) - radius, 0.0) for center, radius in discs
        )
        worst = max(worst, distance)
    return worst


def check_circuit(label: str, circuit, eta: float, tau: float) -> list:
    """
    Run every consistency check on one circuit.

    Returns
    -------
    list
        One row per check: circuit, check, residual, tolerance and passed.
    """
    L = circuit.L
    basis = gamma_basis(circuit)
    rows = []

    def record(check, compute, tolerance=MATCH_TOL):
        try:
            residual = float(compute())
        except NumericalError as err:
            residual = math.inf
            check = f"{check} ({err})"
        rows.append(
            {
                "circuit": label,
                "check": check,
                "residual": residual,
                "tolerance": tolerance,
                "passed": bool(residual <= tolerance),
            }
        )

    gram = basis.gram()
    record("basis_orthonormal", lambda: np.max(np.abs(gram - np.eye(basis.size))))

    full_HB = build_full_HB(circuit.n, L)
    full_HP = build_full_HP(circuit, eta)
    reduced_HP = build_HP_reduced(L, eta)
    record(
        "projection_HB",
        lambda: _band_distance(
            project_to_subspace(full_HB, basis), build_HB_reduced(L)
        ),
    )
    record(
        "projection_HP",
        lambda: _band_distance(project_to_subspace(full_HP, basis), reduced_HP),
    )

    middle = build_full_HI(circuit, eta, tau, 0.5 * L * tau)
    for t in (0.0, 0.5 * L * tau, L * tau):
        full_HI = middle if t == 0.5 * L * tau else build_full_HI(circuit, eta, tau, t)
        record(
            f"projection_HI(t={t:g})",
            lambda op=full_HI, t=t: _band_distance(
                project_to_subspace(op, basis), build_HI_reduced(L, eta, tau, t)
            ),
        )

    ground = basis.embed(analytic_ground_state(L, eta))
    record("null_vector", lambda: np.linalg.norm(full_HP.apply(ground)), NULL_TOL)

    for name, op in (("HB", full_HB), ("HP", full_HP), ("HI", middle)):
        record(f"invariance_{name}", lambda op=op: subspace_residual(op, basis))

    record("gershgorin_HP", lambda: _outside_discs(reduced_HP))
    return rows


@factory.process_data(outputs=["checks.csv", "hp.coo"])
def process(config, output_mgr, user_data, logger):
    """Check every circuit and tabulate the residuals."""
    rows = []
    for label, circuit in user_data.circuits:
        rows.extend(check_circuit(label, circuit, config["eta"], config["tau"]))
    checks = pd.DataFrame(rows)

    failed = checks.loc[~checks["passed"], ["circuit", "check"]]
    finite = checks.loc[np.isfinite(checks["residual"]), "residual"]
    user_data.failures = len(failed)

    output_mgr["checks"].metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("circuit", "circuit label")
        .add_column("check", "check name")
        .add_column("residual", "measured residual")
        .add_column("tolerance", "acceptance tolerance")
        .add_column("passed", "whether residual <= tolerance")
    )
    output_mgr["checks"].data = checks

    if config["export_coo"]:
        _, first = user_data.circuits[0]
        output_mgr["hp"].data = export_coo(build_full_HP(first, config["eta"]))

    output_mgr["summary"].data = {
        "command": "verify",
        "params": config.params(),
        "circuits": [
            {"label": label, "n": circuit.n, "L": circuit.L}
            for label, circuit in user_data.circuits
        ],
        "checks": int(len(checks)),
        "all_passed": user_data.failures == 0,
        "max_residual": float(finite.max()) if len(finite) else None,
        "failed": failed.to_dict(orient="records"),
    }

    for row in failed.itertuples():
        logger.display_error_msg(f"{row.circuit}: check {row.check} failed")


@factory.close_command
def close(user_data):
    """Turn failed checks into a numerical failure once the report is written."""
    if user_data.failures:
        err_str = f"{user_data.failures} verification check(s) failed; see checks.csv."
        raise NumericalError(err_str)


command = factory.generate_command()
