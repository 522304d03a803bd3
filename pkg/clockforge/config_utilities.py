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
"""Configuration-file and environment helpers for clockforge."""

# Built in Libraries
import os
from typing import Any, Dict, List

# 3rd Party Libraries
import xmltodict

# Custom libraries
from clockforge.exceptions import ConfigError

THREADS_ENV = "CLOCKFORGE_THREADS"
DEBUG_ENV = "CLOCKFORGE_DEBUG"


def read_config_file(path: str) -> Dict[str, Any]:
    """
    Read an XML run configuration.

    Parameters
    ----------
    path: str
        File shaped like ``<Configuration><eta>4</eta>...</Configuration>``.

    Returns
    -------
    Dict[str, Any]
        Parsed settings with string values, keyed by element name.
    """
    try:
        with open(path, "r", encoding="utf-8") as fd:
            xml_dict = xmltodict.parse(fd.read())
    except OSError as err:
        raise ConfigError(f"Cannot read config file {path}: {err}") from err
    except Exception as err:  # expat raises its own error type
        raise ConfigError(f"Config file {path} is not valid XML: {err}") from err

    return get_xml_config_settings(xml_dict, path)


def get_xml_config_settings(
    xml_dict: Dict[Any, Any], source: str = "config"
) -> Dict[str, Any]:
    """
    Get the run settings from a parsed configuration document.

    Parameters
    ----------
    xml_dict: OrderedDictionary
        Output of ``xmltodict.parse``.
    source: str
        Name used in error messages.

    Returns
    -------
    Dict[str, Any]
        Settings below the ``Configuration`` root. Empty elements map to None.
    """
    if "Configuration" not in xml_dict:
        raise ConfigError(f"{source} has no <Configuration> root element.")

    settings = xml_dict["Configuration"] or {}
    for key, value in settings.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"{source}: element <{key}> must hold a single value.")
    return dict(settings)


def thread_count() -> int:
    """Return the worker cap from CLOCKFORGE_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        err_str = f"{THREADS_ENV} must be a positive integer, got '{raw}'."
        raise ConfigError(err_str) from None
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'.")
    return count


def debug_enabled() -> bool:
    """Check whether the timing monitor is switched on."""
    return os.environ.get(DEBUG_ENV, "0") == "1"


def ensure_writable_dir(path: str) -> str:
    """Create the output directory if needed and check that it accepts files."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as err:
        raise ConfigError(f"Cannot create output directory {path}: {err}") from err
    if not os.access(path, os.W_OK):
        raise ConfigError(f"Output directory {path} is not writable.")
    return os.path.abspath(path)


def bundled_circuit_path(name: str = "bell.circ") -> str:
    """Return the path of a circuit file shipped with the package."""
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", name)


def parse_l_list(text: str) -> List[int]:
    """
    Parse an L list given as ``a,b,c`` or as an inclusive ``start:stop:step``.

    Examples
    --------
    >>> parse_l_list("10:16:2")
    [10, 12, 14, 16]
    """
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [int(part) for part in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step < 1:
                raise ConfigError("step must be positive")
            values = list(range(start, stop + 1, step))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except (ValueError, ConfigError) as err:
        raise ConfigError(f"Cannot parse L list '{text}': {err}") from None

    if not values:
        raise ConfigError(f"L list '{text}' is empty.")
    return values
