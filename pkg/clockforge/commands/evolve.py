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
evolve: adiabatic runs of the three-stage, naive and moving-well schedules.

Writes ``evolution.csv`` with columns ``t, overlap, norm`` (plus
``abs_err_sq, rel_err_sq`` under ``--error-study``) and ``summary.json`` with
``params, mode, final_overlap, success_probability, max_norm_drift, steps``
and ``analytic_success_probability``. ``error_study`` is present only with
``--error-study``. ``runtime_seconds`` is present only when CLOCKFORGE_DEBUG
is set, so default summaries are identical across repeated runs.
"""

# Built in Libraries
import time

# 3rd Party Libraries
import numpy as np

# Custom libraries
from clockforge.clock_hamiltonian import success_probability
from clockforge.command_factory import CommandFactory
from clockforge.config_utilities import debug_enabled
from clockforge.evolution import (
    continuum_ground_state,
    error_series,
    run_naive,
    run_stage2,
    run_three_stage,
)

# Largest max-min spread of the overlap series still reported as flat
DRIFT_TOL = 0.05

# Initialization of the command factory, used for making the command class
factory = CommandFactory(
    "evolve", help="Propagate a schedule and record ground-state overlaps."
)
factory.add_argument(
    "--mode",
    choices=["three-stage", "naive", "stage2"],
    default="three-stage",
    help="Schedule to propagate.",
)
factory.add_argument("--eta", type=float, default=4.0, help="Bias parameter, > 1.")
factory.add_argument("--L", type=int, default=20, help="Number of gates.")
factory.add_argument("--tau", type=float, default=40.0, help="Time per site.")
factory.add_argument(
    "--T", type=float, default=1000.0, help="Duration of the naive run."
)
factory.add_argument("--T1", type=float, default=50.0, help="Duration of stage 1.")
factory.add_argument("--T3", type=float, default=50.0, help="Duration of stage 3.")
factory.add_argument(
    "--ramp",
    choices=["linear", "smoothstep"],
    default="linear",
    help="Interpolation profile of the ramped stages.",
)
factory.add_argument(
    "--dt", type=float, default=None, help="Time step (default: per-stage rule)."
)
factory.add_argument(
    "--error-study",
    action="store_true",
    default=False,
    help="Compare the moving well against the continuum reference.",
)
factory.add_argument(
    "--initial-overlap",
    type=float,
    default=1.0,
    help="Ground-state weight of the stage-2 initial state.",
)


@factory.initialize_command
def init(config, user_data, logger):
    """Pick the schedule; error studies always run the moving well alone."""
    user_data.mode = config["mode"]
    if config["error_study"] and user_data.mode != "stage2":
        logger.display_warn_msg(
            f"--error-study runs the stage2 schedule, ignoring --mode {user_data.mode}"
        )
        user_data.mode = "stage2"
    if config["initial_overlap"] != 1.0 and user_data.mode != "stage2":
        logger.display_warn_msg("--initial-overlap only applies to the stage2 schedule")
    return True


def _run(config, mode: str):
    if mode == "three-stage":
        return run_three_stage(
            config["L"],
            config["eta"],
            tau=config["tau"],
            T1=config["T1"],
            T3=config["T3"],
            ramp=config["ramp"],
            dt=config["dt"],
        )
    if mode == "naive":
        return run_naive(
            config["L"],
            config["eta"],
            T=config["T"],
            ramp=config["ramp"],
            dt=config["dt"],
        )
    return run_stage2(
        config["L"],
        config["eta"],
        tau=config["tau"],
        dt=config["dt"],
        initial_overlap=config["initial_overlap"],
    )


@factory.process_data(outputs=["evolution.csv"])
def process(config, output_mgr, user_data, logger):
    """Propagate, then optionally measure the error against the reference."""
    start_time = time.time()
    result = _run(config, user_data.mode)
    table = result.to_dataframe()

    metadata = (
        output_mgr.create_anchor_metadata()
        .add_column("t", "time")
        .add_column("overlap", "overlap with the instantaneous ground state")
        .add_column("norm", "state norm")
    )

    summary = {
        "command": "evolve",
        "params": config.params(),
        "mode": user_data.mode,
        "analytic_success_probability": success_probability(config["L"], config["eta"]),
    }
    summary.update(result.summary())

    if config["error_study"]:
        reference = continuum_ground_state(config["eta"])
        errors = error_series(result, reference, config["tau"])
        table["abs_err_sq"] = errors.abs_error_sq
        table["rel_err_sq"] = errors.rel_error_sq
        metadata.add_column("abs_err_sq", "squared error, norm L+1 convention")
        metadata.add_column("rel_err_sq", "relative squared error")

        drift = float(np.ptp(result.overlap_series))
        study = errors.summary()
        study.update(
            {
                "epsilon0": reference.epsilon0,
                "overlap_drift": drift,
                "overlap_flat": drift <= DRIFT_TOL,
            }
        )
        summary["error_study"] = study
        if study["within_bound"] is False:
            logger.display_warn_msg("Measured error exceeds the error bound.")

    anchor = output_mgr["evolution"]
    anchor.metadata = metadata
    anchor.data = table
    anchor.set_plot(
        "t",
        ["overlap", "norm"],
        f"{user_data.mode} evolution, eta={config['eta']:g}, L={config['L']}",
    )

    if debug_enabled():
        summary["runtime_seconds"] = time.time() - start_time
    output_mgr["summary"].data = summary
    logger.display_info_msg(
        f"Final overlap {result.final_overlap:.6f}, "
        f"success probability {result.success_probability_final:.6f}"
    )


command = factory.generate_command()
