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
"""Implementation of a command factory for the clockforge command line."""

# Built in Libraries
import inspect
import os
import time
from functools import wraps
from typing import Callable, List

# 3rd Party Libraries
import pandas as pd

# Custom libraries
from clockforge.config_utilities import debug_enabled
from clockforge.exceptions import ConfigError
from clockforge.helper_classes import RunContext

SUMMARY_FILE = "summary.json"
TIMING_FILE = "timing.csv"


class CommandFactory:
    """
    Class for generating a subcommand of the clockforge command line.

    The CommandFactory uses decorators to inject the per-command functions
    while it owns the boilerplate around them: argument declaration, output
    anchors, writing every output file and the optional timing monitor.

    Attributes
    ----------
    command : object
        A dynamic subclass of RunContext. It is filled in as methods of the
        factory are called (directly or as decorators) and returned by
        generate_command.
    """

    def __init__(self, command_name: str, help: str = "") -> None:
        """
        Initialize a CommandFactory object.

        Parameters
        ----------
        command_name : str
            The subcommand name as typed on the command line, e.g. ``gap-scan``.
        help : str
            One-line description shown by ``clockforge --help``.

        Examples
        --------
            factory = CommandFactory("gap-scan", help="Scan a gap family.")
        """

        # Per instance copy so that several commands can be generated without
        # sharing class attributes through RunContext
        class Command(RunContext):
            pass

        self._command = Command

        setattr(self._command, "command_name", command_name)
        setattr(self._command, "command_help", help)
        setattr(self._command, "arguments", [])
        setattr(self._command, "output_files", [SUMMARY_FILE])

        # Initialize all hooks with default behavior
        def noop(*args, **kwargs) -> None:
            pass

        def always_true(*args, **kwargs):
            return True

        self._init_func = always_true
        self._process_func = noop
        self._close_func = noop

    def add_argument(self, *flags: str, **kwargs) -> "CommandFactory":
        """
        Declare a command line flag for this command.

        The keyword arguments are those of ``argparse.ArgumentParser.add_argument``.
        The ``default`` is kept by the command line front end, which applies it
        only when neither a flag nor the config file sets the value.
        """
        if not flags or not flags[0].startswith("--"):
            err_str = (
                f"{self._command.command_name}: the first flag must start "
                f"with '--', got {flags}."
            )
            raise ValueError(err_str)
        self._command.arguments.append((flags, dict(kwargs)))
        return self

    def initialize_command(self, func: Callable) -> Callable:
        """
        Register a function that checks and prepares the run.

        The function may request any of ``config``, ``output_mgr``,
        ``user_data`` and ``logger`` by parameter name and must return True
        when the run can go ahead.
        """
        self._init_func = _apply_parameter_requests(func)
        return func

    def process_data(self, outputs: List[str]) -> Callable:
        """
        Register the function doing the work of the command.

        Parameters
        ----------
        outputs : List[str]
            File names the command may produce besides ``summary.json``. Each
            becomes an output anchor named after the file stem. Anchors left
            empty are not written.

        Examples
        --------
            @factory.process_data(outputs=["gap_scan.csv"])
            def process(config, output_mgr, user_data, logger):
                output_mgr["gap_scan"].data = df
        """

        def decorator_process_data(func: Callable) -> Callable:
            for file_name in outputs:
                if file_name not in self._command.output_files:
                    self._command.output_files.append(file_name)
            self._process_func = _apply_parameter_requests(func)
            return func

        return decorator_process_data

    def close_command(self, func: Callable) -> Callable:
        """Register a function run after every output has been written."""
        self._close_func = _apply_parameter_requests(func)
        return func

    def generate_command(self):
        """
        Return the constructed class definition for the command.

        Returns
        -------
        object: RunContext class definition
            Instantiate it with a resolved configuration and call ``run``.

        Example
        -------
            command = factory.generate_command()
        """
        command_name = self._command.command_name

        @_monitor("init")
        def run_init(current_run):
            current_run.initialized = self._init_func(current_run)
            if not current_run.initialized:
                err_str = f"{command_name}: the configuration was rejected."
                raise ConfigError(err_str)

        @_monitor("process")
        def run_process(current_run):
            self._process_func(current_run)

        @_monitor("push")
        def run_push(current_run):
            return current_run.push_all_outputs()

        @_monitor("close")
        def run_close(current_run):
            self._close_func(current_run)

        def run(current_run) -> List[str]:
            run_init(current_run)
            run_process(current_run)
            written = run_push(current_run)
            run_close(current_run)
            return written

        setattr(self._command, "run", run)
        return self._command


def _apply_parameter_requests(func):
    @wraps(func)
    def wrapped(current_run):
        sig = inspect.signature(func)

        func_params = {
            "config": current_run.config,
            "output_mgr": current_run.output_manager,
            "user_data": current_run.user_data,
            "logger": current_run.logging,
        }

        try:
            # Get the expected parameter names
            param_names = [name for name, param in sig.parameters.items()]
            passed_params = {name: func_params[name] for name in param_names}
        except KeyError:
            # Failed to build the requested params, using defaults
            return func(
                current_run.config,
                current_run.output_manager,
                current_run.user_data,
                current_run.logging,
            )
        else:
            return func(**passed_params)

    return wrapped


def _monitor(name):
    def _monitor_decorator(func):
        @wraps(func)
        def wrapped(*args, **kwargs):
            if not debug_enabled():
                return func(*args, **kwargs)

            current_run = args[0]
            start_time = time.time()
            val = func(*args, **kwargs)
            time_diff_ms = (time.time() - start_time) * 1000

            file_name = os.path.join(current_run.out_dir, TIMING_FILE)
            df = pd.DataFrame(
                {"Func": [f"{current_run.command_name}.{name}"], "Time": [time_diff_ms]}
            )
            if os.path.isfile(file_name):
                df = pd.concat([pd.read_csv(file_name), df])

            df.to_csv(file_name, index=False)
            return val

        return wrapped

    return _monitor_decorator
