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
"""scaling: exponential collapse of the naive minimum gap with L."""

# Custom libraries
from clockforge.command_factory import CommandFactory
from clockforge.config_utilities import parse_l_list
from clockforge.spectral import gap_scaling_fit

# Initialization of the command factory, used for making the command class
factory = CommandFactory(
    "scaling", help="Fit ln(min gap) against L for the naive interpolation."
)
factory.add_argument("--eta", type=float, default=4.0, help="Bias parameter, > 1.")
factory.add_argument(
    "--L-list",
    default="10:24:2",
    help="Clock lengths, comma separated or inclusive start:stop:step.",
)
factory.add_argument(
    "--mode",
    choices=["eigen", "secular"],
    default="eigen",
    help="Locate minima with the eigensolver or use the secular equation.",
)


@factory.initialize_command
def init(config, user_data, logger):
    """Expand the L list."""
    user_data.L_values = parse_l_list(config["L_list"])
    logger.display_info_msg(
        f"Scaling fit over L={user_data.L_values} ({config['mode']} mode)"
    )
    return True


@factory.process_data(outputs=["scaling.csv"])
def process(config, output_mgr, user_data, logger):
    """Fit the scaling law and tabulate the per-L minima."""
    fit = gap_scaling_fit(config["eta"], user_data.L_values, mode=config["mode"])

    anchor = output_mgr["scaling"]
    anchor.metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("L", "number of gates")
        .add_column("s_min", "location of the minimum gap")
        .add_column("gap", "minimum gap")
        .add_column("ln_gap", "ln(minimum gap)")
    )
    anchor.data = fit.to_dataframe()
    anchor.set_plot("L", "ln_gap", f"Naive minimum gap, eta={config['eta']:g}")

    output_mgr["summary"].data = {
        "command": "scaling",
        "params": config.params(),
        "fit": fit.to_json_dict(),
    }
    logger.display_info_msg(
        f"Fitted slope {fit.slope:.6f} (expected {fit.expected_slope:.6f})"
    )


command = factory.generate_command()
