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
"""Command line front end: argument parsing, config precedence and exit codes."""

# Built in Libraries
import argparse
import logging
import math
import sys
from collections import UserDict
from typing import Any, Dict, List, Optional, Sequence, Tuple

# Custom libraries
from clockforge import __version__
from clockforge.commands import COMMANDS
from clockforge.config_utilities import (
    ensure_writable_dir,
    parse_l_list,
    read_config_file,
)
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.helper_classes import LOGGER_NAME
from clockforge.interface_utilities import error_payload

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

GLOBAL_ARGUMENTS = [
    (("--config",), {"default": None, "help": "XML config file with default values."}),
    (
        ("--out",),
        {"default": "./clockforge-out", "help": "Output directory."},
    ),
    (
        ("--gnuplot",),
        {"action": "store_true", "default": False, "help": "Also write plot.gp."},
    ),
    (("--seed",), {"type": int, "default": None, "help": "Seed for random circuits."}),
    (
        ("--verbose", "-v"),
        {"action": "store_true", "default": False, "help": "Log debug messages."},
    ),
    (
        ("--quiet", "-q"),
        {"action": "store_true", "default": False, "help": "Log warnings only."},
    ),
]

# Keys that steer the run but are not parameters of the experiment
AMBIENT_KEYS = ("config", "out", "gnuplot", "verbose", "quiet")

_BOOLEAN_ACTIONS = ("store_true", "store_false")
_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises ConfigError instead of exiting."""

    def error(self, message):
        """Raise usage errors so that main can report them as JSON."""
        raise ConfigError(f"{self.prog}: {message}")


class RunConfig(UserDict):
    """
    Resolved settings of one command run.

    Attributes
    ----------
    command : str
        Subcommand name.
    sources : Dict[str, str]
        Where every value came from: ``default``, ``file`` or ``flag``.
    """

    def __init__(
        self,
        command: str,
        values: Dict[str, Any],
        sources: Optional[Dict[str, str]] = None,
    ) -> None:
        super().__init__(values)
        self.command = command
        self.sources = dict(sources or {})

    def params(self) -> Dict[str, Any]:
        """Experiment parameters, without output and logging switches."""
        return {
            key: value for key, value in self.data.items() if key not in AMBIENT_KEYS
        }

    def _require(self, key: str, ok, description: str) -> None:
        if key not in self.data or self.data[key] is None:
            return
        value = self.data[key]
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key} must be finite, got {value}.")
        if not ok(value):
            raise ConfigError(f"{key} must be {description}, got {value}.")

    def validate(self) -> "RunConfig":
        """
        Check parameter ranges and prepare the output directory.

        Raises
        ------
        ConfigError
            On the first invalid value.
        """
        self._require("eta", lambda v: v > 1.0, "greater than 1")
        self._require("L", lambda v: v >= 1, ">= 1")
        for key in ("tau", "T", "dt", "S", "h_grid"):
            self._require(key, lambda v: v > 0.0, "positive")
        for key in ("T1", "T3"):
            self._require(key, lambda v: v >= 0.0, "non-negative")
        self._require("points", lambda v: v >= 3, ">= 3")
        self._require("random", lambda v: v >= 0, "non-negative")
        self._require("initial_overlap", lambda v: 0.0 < v <= 1.0, "in (0, 1]")
        if self.data.get("L_list") is not None:
            if min(parse_l_list(self.data["L_list"])) < 1:
                raise ConfigError("Every entry of L_list must be >= 1.")
        if self.data.get("verbose") and self.data.get("quiet"):
            raise ConfigError("--verbose and --quiet are mutually exclusive.")

        self.data["out"] = ensure_writable_dir(self.data["out"])
        return self


def _dest(flags: Sequence[str], kwargs: Dict[str, Any]) -> str:
    if "dest" in kwargs:
        return kwargs["dest"]
    return flags[0].lstrip("-").replace("-", "_")


def _argument_specs(command) -> Dict[str, Tuple[Sequence[str], Dict[str, Any]]]:
    """Map every destination to the first declaration that targets it."""
    specs = {}
    for flags, kwargs in GLOBAL_ARGUMENTS + list(command.arguments):
        specs.setdefault(_dest(flags, kwargs), (flags, kwargs))
    return specs


def _defaults(command) -> Dict[str, Any]:
    values = {}
    for flags, kwargs in GLOBAL_ARGUMENTS + list(command.arguments):
        if "default" in kwargs:
            values.setdefault(_dest(flags, kwargs), kwargs["default"])
    return values


def _convert(key: str, raw: Any, kwargs: Dict[str, Any], source: str) -> Any:
    """Turn a config-file string into the type its flag declares."""
    if raw is None:
        raise ConfigError(f"{source}: element <{key}> is empty.")
    text = str(raw).strip()

    if kwargs.get("action") in _BOOLEAN_ACTIONS:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ConfigError(f"{source}: <{key}> must be true or false, got '{text}'.")

    convert = kwargs.get("type", str)
    try:
        value = convert(text)
    except ValueError:
        err_str = f"{source}: <{key}> must be of type {convert.__name__}, got '{text}'."
        raise ConfigError(err_str) from None
    if "choices" in kwargs and value not in kwargs["choices"]:
        err_str = f"{source}: <{key}> must be one of {kwargs['choices']}, got '{text}'."
        raise ConfigError(err_str)
    return value


def resolve_config(command, explicit: Dict[str, Any]) -> RunConfig:
    """
    Merge defaults, the optional XML config file and explicit flags.

    Parameters
    ----------
    command : object
        Command class from ``clockforge.commands.COMMANDS``.
    explicit : Dict[str, Any]
        Only the flags given on the command line.

    Returns
    -------
    RunConfig
        Validated configuration; flags win over the file, which wins over
        the defaults.
    """
    specs = _argument_specs(command)
    values = _defaults(command)
    sources = {key: "default" for key in values}

    config_path = explicit.get("config")
    if config_path:
        settings = read_config_file(config_path)
        for key, raw in settings.items():
            if key not in specs or key == "config":
                raise ConfigError(
                    f"{config_path}: unknown setting <{key}> "
                    f"for {command.command_name}."
                )
            values[key] = _convert(key, raw, specs[key][1], config_path)
            sources[key] = "file"

    for key, value in explicit.items():
        values[key] = value
        sources[key] = "flag"

    return RunConfig(command.command_name, values, sources).validate()


def build_parser() -> argparse.ArgumentParser:
    """Build the parser with one subparser per command."""
    parser = _Parser(
        prog="clockforge",
        description="Clock-Hamiltonian gap analysis and adiabatic evolution.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    for name, command in COMMANDS.items():
        subparser = subparsers.add_parser(
            name,
            help=command.command_help,
            description=command.command_help,
            argument_default=argparse.SUPPRESS,
        )
        for flags, kwargs in GLOBAL_ARGUMENTS + list(command.arguments):
            kwargs = dict(kwargs)
            default = kwargs.pop("default", None)
            if default is not None and kwargs.get("action") not in _BOOLEAN_ACTIONS:
                kwargs["help"] = f"{kwargs.get('help', '')} Default: {default}."
            subparser.add_argument(*flags, **kwargs)
    return parser


def configure_logging(verbose: bool, quiet: bool) -> logging.Handler:
    """Attach a standard-error handler to the clockforge logger."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package_logger = logging.getLogger(LOGGER_NAME)
    package_logger.addHandler(handler)
    package_logger.setLevel(
        logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    )
    return handler


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one clockforge command.

    Returns
    -------
    int
        0 on success, 2 on a configuration error, 3 on a numerical failure.
    """
    handler = None
    try:
        explicit = vars(build_parser().parse_args(argv))
        command = COMMANDS[explicit.pop("command")]
        config = resolve_config(command, explicit)
        handler = configure_logging(config["verbose"], config["quiet"])

        written = command(config).run()
        logger.info(
            "%s wrote %d file(s) to %s",
            command.command_name,
            len(written),
            config["out"],
        )
        return 0
    except (ConfigError, NumericalError) as err:
        print(error_payload(err), file=sys.stderr)
        return err.exit_code
    except OSError as err:
        failure = ConfigError(f"Cannot write outputs: {err}")
        print(error_payload(failure), file=sys.stderr)
        return failure.exit_code
    finally:
        if handler is not None:
            logging.getLogger(LOGGER_NAME).removeHandler(handler)
