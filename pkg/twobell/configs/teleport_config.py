# Copyright 2024 The twobell Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Default config for the twobell command-line tool."""
from ml_collections import config_dict


def get_config() -> config_dict.ConfigDict:
  """Return config object for run, verify and resources."""
  config = config_dict.ConfigDict()

  config.seed = 0
  config.trials = 1
  # Threads used by `run`; output is always emitted in trial order.
  config.num_workers = 1
  config.variant = 'two-cnot'
  config.channel = 'phi+:phi+'
  config.output_format = 'json'

  config.tolerances = config_dict.ConfigDict(
      dict(
          factorization=1e-10,
          fidelity=1e-10,
          probability=1e-12,
          autonormalize=1e-6,
      ))

  config.verify = config_dict.ConfigDict(
      dict(
          seed=0,
          branch_batch=100,
          compression_random=20,
          oracle_batch=100,
          channel_batch=5,
      ))

  config.resources = config_dict.ConfigDict(dict(
      n_min=1,
      n_max=8,
  ))

  config.lock()
  return config
