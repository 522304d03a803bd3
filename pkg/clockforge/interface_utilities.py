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
"""Serialization helpers shared by the command modules."""

# Built in Libraries
import json
import os
from collections import namedtuple
from typing import Any, Iterable, List, Optional

# 3rd Party Libraries
import numpy as np

import pandas as pd

# Custom libraries
from clockforge.exceptions import ConfigError

FLOAT_FORMAT = "%.17g"

# One panel of a gnuplot script: columns are names in the CSV header
PlotSpec = namedtuple(
    "PlotSpec", ["file_name", "x", "y", "title", "xlabel", "ylabel", "logscale"]
)


def is_dataframe(input: Any) -> bool:
    """
    Check if the input variable is a pandas dataframe.

    Parameters
    ----------
    input
        Any variable

    Returns
    -------
    bool
        Indication if the input is a pandas dataframe
    """
    return isinstance(input, pd.DataFrame)


def to_builtin(value: Any) -> Any:
    """
    Convert numpy scalars and arrays into plain Python objects for JSON.

    Non-finite floats become None so the output stays strict JSON.
    """
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(item) for item in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def dataframe_from_columns(columns: dict) -> pd.DataFrame:
    """Build a dataframe from equal-length columns, keeping the given order."""
    lengths = {len(np.atleast_1d(values)) for values in columns.values()}
    if len(lengths) > 1:
        err_str = f"Columns {list(columns)} have unequal lengths {sorted(lengths)}."
        raise ValueError(err_str)
    return pd.DataFrame(
        {name: np.atleast_1d(values) for name, values in columns.items()}
    )


def write_dataframe(
    df: pd.DataFrame, path: str, columns: Optional[List[str]] = None
) -> str:
    """
    Write a dataframe as CSV with round-trip float precision.

    Parameters
    ----------
    df: pd.DataFrame
        Table to write.
    path: str
        Destination file.
    columns: List[str], optional
        Required column order. Missing columns are an error.

    Returns
    -------
    str
        The path written.
    """
    if not is_dataframe(df):
        err_str = (
            f"Expected a dataframe for {os.path.basename(path)}, "
            f"got {type(df).__name__}."
        )
        raise TypeError(err_str)
    if columns is not None:
        missing = [name for name in columns if name not in df.columns]
        if missing:
            err_str = f"{os.path.basename(path)} is missing columns {missing}."
            raise ValueError(err_str)
        df = df[list(columns)]
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_json(data: dict, path: str) -> str:
    """Write a dictionary as sorted, indented JSON."""
    with open(path, "w", encoding="utf-8", newline="\n") as fd:
        json.dump(to_builtin(data), fd, indent=2, sort_keys=True, allow_nan=False)
        fd.write("\n")
    return path


def write_text(text: str, path: str) -> str:
    """Write a text payload unchanged."""
    with open(path, "w", encoding="utf-8", newline="\n") as fd:
        fd.write(text)
    return path


def error_payload(err: Exception) -> str:
    """Render an exception as the one-line JSON the command line prints."""
    payload = {
        "error": type(err).__name__,
        "message": str(err),
        "exit_code": int(getattr(err, "exit_code", 1)),
    }
    return json.dumps(payload, sort_keys=True)


def _quote(text: str) -> str:
    return '"' + str(text).replace('"', "'") + '"'


def gnuplot_script(specs: Iterable[PlotSpec]) -> str:
    """
    Build a gnuplot script with one page per plot spec.

    Each spec reads its CSV by column name, so the script keeps working when
    columns are appended to the data files.
    """
    specs = list(specs)
    if not specs:
        raise ConfigError("Nothing to plot: the command produced no tabular output.")

    lines = [
        "# Run with: gnuplot -persist plot.gp",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
    ]
    for spec in specs:
        y_columns = [spec.y] if isinstance(spec.y, str) else list(spec.y)
        lines.append("")
        lines.append(f"set title {_quote(spec.title)}")
        lines.append(f"set xlabel {_quote(spec.xlabel or spec.x)}")
        lines.append(f"set ylabel {_quote(spec.ylabel or ', '.join(y_columns))}")
        lines.append("set logscale y" if spec.logscale else "unset logscale y")
        series = [
            f"{_quote(spec.file_name)} using {_quote(spec.x)}:{_quote(column)} "
            f"with lines title {_quote(column)}"
            for column in y_columns
        ]
        lines.append("plot " + ", \\\n     ".join(series))
        lines.append("pause -1")
    return "\n".join(lines) + "\n"
