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
"""gap-scan: the two lowest levels of an interpolation family on an s-grid."""

# 3rd Party Libraries
import numpy as np

# Custom libraries
from clockforge.command_factory import CommandFactory
from clockforge.reduced_model import critical_point, interpolation_family
from clockforge.spectral import (
    gap_scan,
    scaled_stage1_gap_bound,
    stage1_gap_bound,
    weyl_gap_bound,
)

# Initialization of the command factory, used for making the command class
factory = CommandFactory(
    "gap-scan", help="Scan the spectral gap of the naive, stage1 or stage3 family."
)
factory.add_argument(
    "--family",
    choices=["naive", "stage1", "stage3"],
    default="naive",
    help="Interpolation family to scan.",
)
factory.add_argument("--eta", type=float, default=4.0, help="Bias parameter, > 1.")
factory.add_argument("--L", type=int, default=16, help="Number of gates.")
factory.add_argument(
    "--tau", type=float, default=40.0, help="Time per site of the moving well."
)
factory.add_argument(
    "--points", type=int, default=401, help="Number of grid points on [0, 1]."
)
factory.add_argument(
    "--refine",
    action="store_true",
    default=True,
    help="Refine the grid minimum by golden-section search.",
)
factory.add_argument(
    "--no-refine",
    dest="refine",
    action="store_false",
    help="Report the raw grid minimum.",
)


@factory.initialize_command
def init(config, user_data, logger):
    """Build the family and the grid."""
    if config["points"] < 3:
        logger.display_error_msg("A gap scan needs at least 3 grid points.")
        return False

    user_data.family = interpolation_family(
        config["family"], config["L"], config["eta"], config["tau"]
    )
    user_data.grid = np.linspace(0.0, 1.0, config["points"])
    logger.display_info_msg(
        f"Scanning the {config['family']} family: eta={config['eta']}, "
        f"L={config['L']}, {config['points']} points"
    )
    return True


def _bound_summary(family: str, eta: float, scan) -> dict:
    """Analytic reference matching the scanned family."""
    if family == "naive":
        return {"kind": "critical_point", "s_star": critical_point(eta)}

    if family == "stage1":
        value = min(stage1_gap_bound(eta, 0.0), stage1_gap_bound(eta, 1.0))
        return {
            "kind": "stage1_gershgorin",
            "value": value,
            "at_min_location": stage1_gap_bound(eta, scan.min_location),
            "scaled": scaled_stage1_gap_bound(eta),
            "holds": bool(scan.min_value >= value),
        }

    if eta < 4.0:
        return {"kind": "weyl", "value": None, "holds": None}
    value = weyl_gap_bound(eta)
    return {"kind": "weyl", "value": value, "holds": bool(scan.min_value >= value)}


@factory.process_data(outputs=["gap_scan.csv"])
def process(config, output_mgr, user_data, logger):
    """Scan, refine and tabulate the gap."""
    scan = gap_scan(user_data.family, user_data.grid, refine=config["refine"])

    anchor = output_mgr["gap_scan"]
    anchor.metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("param", "interpolation parameter s")
        .add_column("e0", "ground energy")
        .add_column("e1", "first excited energy")
        .add_column("gap", "spectral gap e1 - e0")
    )
    anchor.data = scan.to_dataframe()
    anchor.set_plot(
        "param",
        "gap",
        f"{config['family']} gap, eta={config['eta']:g}, L={config['L']}",
        logscale=config["family"] == "naive",
    )

    bound = _bound_summary(config["family"], config["eta"], scan)
    if bound.get("holds") is False:
        logger.display_warn_msg("The scanned minimum gap is below the analytic bound.")

    output_mgr["summary"].data = {
        "command": "gap-scan",
        "params": config.params(),
        "scan": scan.summary(),
        "bound": bound,
    }
    logger.display_info_msg(
        f"Minimum gap {scan.min_value:.6g} at s={scan.min_location:.6f}"
    )


command = factory.generate_command()
