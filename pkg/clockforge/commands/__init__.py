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
"""Subcommands of the clockforge command line, keyed by name."""

# Custom libraries
from clockforge.commands import evolve, gap_scan, ground_state, scaling, verify

COMMANDS = {
    module.command.command_name: module.command
    for module in (gap_scan, scaling, evolve, verify, ground_state)
}
