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
"""Shared fixtures for the clockforge test suite."""

# 3rd Party Libraries
import numpy as np

import pytest

# Custom libraries
from clockforge.circuit_model import load_circuit
from clockforge.config_utilities import bundled_circuit_path


@pytest.fixture
def bell_circuit():
    """The bundled two-qubit Bell-pair circuit."""
    return load_circuit(bundled_circuit_path())


@pytest.fixture
def rng():
    """A seeded generator so random circuits are reproducible."""
    return np.random.default_rng(7)


@pytest.fixture
def out_dir(tmp_path):
    """A fresh output directory for command runs."""
    path = tmp_path / "out"
    path.mkdir()
    return path


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    """Keep scans sequential and the timing monitor off unless a test opts in."""
    monkeypatch.setenv("CLOCKFORGE_THREADS", "1")
    monkeypatch.delenv("CLOCKFORGE_DEBUG", raising=False)
