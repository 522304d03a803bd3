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
"""Base classes for command runs and their output anchors/managers."""

# Built in Libraries
import copy
import logging
import os
from collections import UserDict
from functools import partial
from types import SimpleNamespace
from typing import Any, List, Mapping, Optional, Union

# 3rd Party Libraries
import pandas as pd

# Custom libraries
import clockforge.interface_utilities as interface_utils

LOGGER_NAME = "clockforge"
PLOT_FILE = "plot.gp"


class RunContext:
    """Base run class to be specialised by the command factory."""

    command_name = "command"
    command_help = ""
    output_files: List[str] = []
    arguments: List[tuple] = []

    def __init__(self, config: Mapping[str, Any]) -> None:
        # Run state vars
        self._state_vars = SimpleNamespace(
            initialized=False, output_anchors={}, config=config, written=[]
        )

        # Every declared output gets an anchor up front
        for file_name in self.output_files:
            anchor = OutputAnchor(file_name)
            self._state_vars.output_anchors[anchor.name] = anchor

        # Command message methods
        logger = logging.getLogger(LOGGER_NAME)
        self.logging = SimpleNamespace(
            display_error_msg=partial(logger.log, logging.ERROR),
            display_warn_msg=partial(logger.log, logging.WARNING),
            display_info_msg=partial(logger.log, logging.INFO),
            display_debug_msg=partial(logger.log, logging.DEBUG),
        )

        # Custom data
        self.user_data = SimpleNamespace()

        # Configure managers last so the instance is fully set up
        self.output_manager = OutputManager(self)

    @property
    def initialized(self) -> bool:
        """Getter for run initialization state."""
        return self._state_vars.initialized

    @initialized.setter
    def initialized(self, value: bool) -> None:
        """Setter for run initialization state."""
        self._state_vars.initialized = bool(value)

    @property
    def config(self) -> Mapping[str, Any]:
        """Getter for the resolved run configuration."""
        return self._state_vars.config

    @property
    def out_dir(self) -> str:
        """Directory every output of this run is written to."""
        return self.config["out"]

    @property
    def written(self) -> List[str]:
        """Paths written so far, in write order."""
        return list(self._state_vars.written)

    def push_all_outputs(self) -> List[str]:
        """Write every anchor holding data, plus the gnuplot script if asked."""
        plots = []
        for anchor in self.output_manager.values():
            plot = anchor.plot
            path = anchor.write(self.out_dir)
            if path is None:
                continue
            self._state_vars.written.append(path)
            if plot is not None:
                plots.append(plot)

        if self.config.get("gnuplot") and plots:
            path = interface_utils.write_text(
                interface_utils.gnuplot_script(plots),
                os.path.join(self.out_dir, PLOT_FILE),
            )
            self._state_vars.written.append(path)

        return self.written


class OutputManager(UserDict):
    """Manager of output anchors."""

    def __init__(self, run: RunContext) -> None:
        self._run = run
        self.data = self._run._state_vars.output_anchors

    @property
    def out_dir(self) -> str:
        """Directory the anchors are written to."""
        return self._run.out_dir

    @staticmethod
    def create_anchor_metadata():
        """Create a new anchor metadata object."""
        return AnchorMetadata()


class OutputAnchor:
    """
    Output anchor bookkeeping class with helpers.

    The file extension decides the payload: ``.csv`` holds a dataframe,
    ``.json`` a dictionary and anything else plain text.
    """

    def __init__(self, file_name: str) -> None:
        self.file_name = file_name
        self._data = None
        self._metadata = None
        self._plot = None

    @property
    def name(self) -> str:
        """Anchor name: the file name without its extension."""
        return os.path.splitext(self.file_name)[0]

    @property
    def kind(self) -> str:
        """Payload kind derived from the file extension."""
        extension = os.path.splitext(self.file_name)[1].lower()
        return {".csv": "csv", ".json": "json"}.get(extension, "text")

    @property
    def data(self) -> Union[pd.DataFrame, dict, str, None]:
        """Getter for anchor data."""
        return self._data

    @data.setter
    def data(self, data: Union[pd.DataFrame, dict, str, None]) -> None:
        """Setter for anchor data."""
        self._data = data

    @property
    def metadata(self) -> Optional["AnchorMetadata"]:
        """Getter for the anchor metadata."""
        return copy.deepcopy(self._metadata)

    @metadata.setter
    def metadata(self, metadata: "AnchorMetadata") -> None:
        """Setter for anchor metadata."""
        self._metadata = metadata

    @property
    def plot(self) -> Optional[interface_utils.PlotSpec]:
        """Plot panel for this anchor, if one was requested."""
        return self._plot

    def set_plot(
        self, x: str, y: Union[str, List[str]], title: str, logscale: bool = False
    ) -> None:
        """Attach a gnuplot panel, labelling axes from the column metadata."""
        y_columns = [y] if isinstance(y, str) else list(y)
        metadata = self._metadata
        xlabel = metadata.label(x) if metadata is not None else x
        ylabel = (
            metadata.label(y_columns[0])
            if metadata is not None and len(y_columns) == 1
            else ", ".join(y_columns)
        )
        self._plot = interface_utils.PlotSpec(
            self.file_name, x, y_columns, title, xlabel, ylabel, logscale
        )

    def write(self, out_dir: str) -> Optional[str]:
        """Write the payload into out_dir and clear it. Returns the path or None."""
        if self._data is None:
            return None

        path = os.path.join(out_dir, self.file_name)
        if self.kind == "csv":
            columns = self._metadata.get_column_names() if self._metadata else None
            interface_utils.write_dataframe(self._data, path, columns)
        elif self.kind == "json":
            interface_utils.write_json(self._data, path)
        else:
            interface_utils.write_text(str(self._data), path)

        # Clear the data from the anchor
        self.data = None
        return path


class ColumnMetadata:
    """Column metadata tracking class."""

    def __init__(self, name: str, description: str = "", unit: str = ""):
        self.name = name
        self.description = description
        self.unit = unit


class AnchorMetadata:
    """Class for tracking column metadata for a given anchor."""

    def __init__(self):
        self.columns = []

    @property
    def columns(self) -> List[ColumnMetadata]:
        """Getter for columns."""
        return self._columns

    @columns.setter
    def columns(self, value: List[ColumnMetadata]):
        """Setter for columns."""
        self._columns = value

    def add_column(self, name: str, description: str = "", unit: str = ""):
        """Add a column to this anchor."""
        self.columns.append(ColumnMetadata(name, description, unit))
        return self

    def index_of(self, name: str):
        """Get the column index of a given column name."""
        try:
            return [c.name for c in self.columns].index(name)
        except ValueError:
            return None

    def get_column_by_name(self, name: str) -> Optional[ColumnMetadata]:
        """Get the column given the column name."""
        index = self.index_of(name)
        if index is None:
            return None
        return self.columns[index]

    def get_column_names(self) -> List[str]:
        """Get a list of the column names available."""
        return [c.name for c in self.columns]

    def label(self, name: str) -> str:
        """Axis label for a column: its description, or the bare name."""
        column = self.get_column_by_name(name)
        if column is None or not column.description:
            return name
        if column.unit:
            return f"{column.description} [{column.unit}]"
        return column.description

    def __getitem__(self, key: int) -> ColumnMetadata:
        """Get the column specified by key (an index)."""
        return self.columns[key]

    def __len__(self) -> int:
        """Return the number of columns as the length."""
        return len(self.columns)
