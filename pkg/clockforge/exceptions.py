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
"""Exception types shared by the library and the command line."""


class ConfigError(ValueError):
    """Invalid user input: circuit text, parameters, caps or files."""

    exit_code = 2


class NumericalError(RuntimeError):
    """A numerical routine failed to deliver a trustworthy result."""

    exit_code = 3
