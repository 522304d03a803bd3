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
"""ground-state: the zero-energy history state and the continuum moving well."""

# 3rd Party Libraries
import numpy as np

import pandas as pd

# Custom libraries
from clockforge.clock_hamiltonian import analytic_ground_state, success_probability
from clockforge.command_factory import CommandFactory
from clockforge.evolution import continuum_ground_state, fourth_derivative_bound
from clockforge.interface_utilities import dataframe_from_columns
from clockforge.reduced_model import (
    build_HI_reduced,
    build_HP_reduced,
    potential_profile,
)

# Initialization of the command factory, used for making the command class
factory = CommandFactory(
    "ground-state",
    help="Dump the analytic ground state, the continuum well and its error bound.",
)
factory.add_argument("--eta", type=float, default=4.0, help="Bias parameter, > 1.")
factory.add_argument("--L", type=int, default=20, help="Number of gates.")
factory.add_argument(
    "--S", type=float, default=10.0, help="Half-width of the continuum box."
)
factory.add_argument(
    "--h-grid", type=float, default=0.002, help="Continuum grid spacing."
)
factory.add_argument("--tau", type=float, default=40.0, help="Time per site.")


def potential_snapshots(L: int, eta: float, tau: float) -> pd.DataFrame:
    """Moving-well potential at t = k tau for k = 0...L, in long format."""
    frames = []
    for k in range(L + 1):
        t = k * tau
        frame = potential_profile(build_HI_reduced(L, eta, tau, t))
        frame.insert(0, "t", t)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


@factory.process_data(outputs=["analytic.csv", "continuum.csv", "potentials.csv"])
def process(config, output_mgr, logger):
    """Tabulate both ground states and the moving-well potentials."""
    eta, L, tau = config["eta"], config["L"], config["tau"]

    coefficients = analytic_ground_state(L, eta)
    output_mgr["analytic"].metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("ell", "clock step")
        .add_column("coefficient", "ground-state amplitude")
        .add_column("probability", "ground-state weight")
    )
    output_mgr["analytic"].data = dataframe_from_columns(
        {
            "ell": np.arange(L + 1),
            "coefficient": coefficients,
            "probability": coefficients ** 2,
        }
    )
    output_mgr["analytic"].set_plot(
        "ell", "probability", f"History-state weights, eta={eta:g}", logscale=True
    )

    reference = continuum_ground_state(eta, S=config["S"], h_grid=config["h_grid"])
    output_mgr["continuum"].metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("s", "moving-frame coordinate")
        .add_column("phi", "continuum ground state")
        .add_column("potential", "moving-frame potential")
        .add_column("d4phi", "fourth derivative of phi")
    )
    output_mgr["continuum"].data = reference.to_dataframe()
    output_mgr["continuum"].set_plot(
        "s", ["phi", "potential"], f"Continuum well, eta={eta:g}"
    )

    output_mgr["potentials"].metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("t", "time")
        .add_column("m", "site")
        .add_column("potential", "diagonal of H_I(t)")
        .add_column("depth", "potential below the highest site")
    )
    output_mgr["potentials"].data = potential_snapshots(L, eta, tau)

    bound = fourth_derivative_bound(reference, L, tau)
    null_residual = float(np.linalg.norm(build_HP_reduced(L, eta).matvec(coefficients)))
    output_mgr["summary"].data = {
        "command": "ground-state",
        "params": config.params(),
        "epsilon0": reference.epsilon0,
        "refinement_shift": reference.refinement_shift,
        "error_bound": bound,
        "error_bound_per_site": bound / (L + 1),
        "success_probability": success_probability(L, eta),
        "null_residual": null_residual,
    }
    logger.display_info_msg(
        f"Continuum ground energy {reference.epsilon0:.10f}, error bound {bound:.6g}"
    )


command = factory.generate_command()
