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

"""Entanglement and gate resources of the cluster and two-Bell-pair schemes."""

import dataclasses
import enum
from typing import Any, Dict, List, Optional

import numpy as np

from twobell import bell
from twobell import protocol

NUM_UNKNOWN_COEFFICIENTS = 4
FIDELITY_TOLERANCE = 1e-10

FORMULA_NOTE = (
    'The printed bound log2(ceil(n/2)) gives 1 Bell pair for n = 4, while the '
    'stated conclusions (n = 2 -> 1, n = 4 -> 2) follow ceil(log2 n). '
    'min_bell_pairs uses ceil(log2 n); the printed value is listed alongside.')


class Scheme(enum.Enum):
  CLUSTER = 'cluster'
  TWO_BELL_PAIRS = 'two-bell-pairs'


@dataclasses.dataclass(frozen=True)
class ResourceReport:
  """Resources of one teleportation scheme for the four-coefficient state.

  `classical_bits` and `max_correction_gates` are None when the scheme's
  protocol steps are not modelled.
  """

  scheme_name: str
  channel_qubits: int
  bell_pairs: int
  product_channel: bool
  classical_bits: Optional[int]
  sender_gate_counts: Dict[str, int]
  receiver_gate_counts: Dict[str, int]
  max_correction_gates: Optional[int]
  n_unknown_coefficients: int = NUM_UNKNOWN_COEFFICIENTS
  min_bell_pairs_required: int = 2
  note: str = ''

  @property
  def at_lower_bound(self) -> bool:
    return (self.product_channel and
            self.bell_pairs == self.min_bell_pairs_required)

  def to_dict(self) -> Dict[str, Any]:
    data = dataclasses.asdict(self)
    data['at_lower_bound'] = self.at_lower_bound
    return data


def min_bell_pairs(n_unknown: int) -> int:
  """ceil(log2 n): qubits (hence Bell pairs) carrying n unknown amplitudes."""
  if n_unknown < 1:
    raise ValueError(f'n_unknown must be >= 1, got {n_unknown}.')
  return (n_unknown - 1).bit_length()


def printed_formula_bell_pairs(n_unknown: int) -> float:
  """log2(ceil(n/2)), the bound as printed."""
  if n_unknown < 1:
    raise ValueError(f'n_unknown must be >= 1, got {n_unknown}.')
  return float(np.log2(-(-n_unknown // 2)))


def min_bell_pairs_rows(n_min: int = 1, n_max: int = 8) -> List[Dict[str, Any]]:
  if n_min < 1 or n_max < n_min:
    raise ValueError(f'Invalid range {n_min}..{n_max}.')
  return [{
      'n': n,
      'min_bell_pairs': min_bell_pairs(n),
      'printed_formula': printed_formula_bell_pairs(n),
  } for n in range(n_min, n_max + 1)]


def audit(
    scheme: Scheme,
    variant: protocol.CompressionVariant = protocol.CompressionVariant.TWO_CNOT,
) -> ResourceReport:
  """Counts channel qubits, Bell pairs, classical bits and local gates.

  Args:
    scheme: which channel to audit.
    variant: compression gate list used for the sender and receiver blocks of
      the two-Bell-pair scheme.

  Returns:
    The resource report.  The cluster scheme's protocol steps are out of scope
    so only its channel size is reported.
  """
  required = min_bell_pairs(NUM_UNKNOWN_COEFFICIENTS)
  if scheme == Scheme.CLUSTER:
    channel = protocol.build_channel(
        protocol.ChannelSpec(protocol.ChannelKind.CLUSTER))
    return ResourceReport(
        scheme_name=scheme.value,
        channel_qubits=channel.num_qubits,
        bell_pairs=0,
        product_channel=False,
        classical_bits=None,
        sender_gate_counts={},
        receiver_gate_counts={},
        max_correction_gates=None,
        min_bell_pairs_required=required,
        note='Six-qubit cluster channel; not a product of Bell pairs.',
    )

  spec = protocol.ChannelSpec()
  channel = protocol.build_channel(spec)
  circuit = protocol.compression_circuit(variant)
  table = bell.correction_table(spec.bell_pair)
  return ResourceReport(
      scheme_name=scheme.value,
      channel_qubits=channel.num_qubits,
      bell_pairs=spec.bell_pairs,
      product_channel=True,
      classical_bits=protocol.BELL_MEASUREMENTS *
      bell.CLASSICAL_BITS_PER_MEASUREMENT,
      sender_gate_counts=circuit.gate_counts(),
      receiver_gate_counts=circuit.inverse().gate_counts(),
      max_correction_gates=max(c.num_gates for c in table.values()),
      min_bell_pairs_required=required,
      note=f'Compression variant {variant.value}.',
  )


def saturation_check(
    transcript: protocol.TeleportTranscript,
    tolerance: float = FIDELITY_TOLERANCE,
) -> bool:
  """True iff the run used exactly the minimum Bell pairs with fidelity 1."""
  return (transcript.bell_pairs_used == min_bell_pairs(
      NUM_UNKNOWN_COEFFICIENTS) and transcript.fidelity_8q >= 1.0 - tolerance)
