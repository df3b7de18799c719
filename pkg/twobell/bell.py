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

"""Bell basis states, Bell measurement and Pauli correction tables."""

import dataclasses
import enum
from typing import Dict, List, Optional, Tuple, Union

from absl import logging
import numpy as np

from twobell import statevector as sv

ZERO_PROBABILITY = 1e-12
CLASSICAL_BITS_PER_MEASUREMENT = 2

_SQRT1_2 = 1.0 / np.sqrt(2.0)


class ZeroProbabilityOutcomeError(ValueError):
  """Raised when a forced measurement outcome cannot occur."""


class BellLabel(enum.IntEnum):
  """The four Bell states, in serialization order."""

  PHI_PLUS = 0
  PHI_MINUS = 1
  PSI_PLUS = 2
  PSI_MINUS = 3

  @property
  def token(self) -> str:
    return _BELL_TOKENS[self]

  @classmethod
  def from_token(cls, token: str) -> 'BellLabel':
    for label, name in _BELL_TOKENS.items():
      if name == token.strip().lower():
        return label
    raise ValueError(
        f'Unknown Bell label {token!r}; expected one of '
        f'{sorted(_BELL_TOKENS.values())}.')


_BELL_TOKENS = {
    BellLabel.PHI_PLUS: 'phi+',
    BellLabel.PHI_MINUS: 'phi-',
    BellLabel.PSI_PLUS: 'psi+',
    BellLabel.PSI_MINUS: 'psi-',
}

# Row k holds the amplitudes of BellLabel(k) over |00>, |01>, |10>, |11>.
BELL_VECTORS = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
    ],
    dtype=np.complex128,
) * _SQRT1_2


@dataclasses.dataclass(frozen=True)
class BellOutcome:
  """Joint result of measuring pairs (a, A1) then (c, A2)."""

  first: BellLabel
  second: BellLabel

  def __post_init__(self):
    object.__setattr__(self, 'first', BellLabel(self.first))
    object.__setattr__(self, 'second', BellLabel(self.second))

  @property
  def index(self) -> int:
    return 4 * int(self.first) + int(self.second)

  @classmethod
  def from_index(cls, index: int) -> 'BellOutcome':
    if not 0 <= index < 16:
      raise ValueError(f'Outcome index must be in [0, 16), got {index}.')
    return cls(BellLabel(index // 4), BellLabel(index % 4))

  @property
  def tokens(self) -> List[str]:
    return [self.first.token, self.second.token]

  @property
  def token(self) -> str:
    return ':'.join(self.tokens)

  @classmethod
  def from_token(cls, token: str) -> 'BellOutcome':
    """Parses 'phi+:psi-' style strings."""
    parts = token.split(':')
    if len(parts) != 2:
      raise ValueError(f'Expected "<bell>:<bell>", got {token!r}.')
    return cls(BellLabel.from_token(parts[0]), BellLabel.from_token(parts[1]))


ALL_OUTCOMES = tuple(BellOutcome.from_index(i) for i in range(16))
DEFAULT_CHANNEL = (BellLabel.PHI_PLUS, BellLabel.PHI_PLUS)


class PauliOp(enum.IntEnum):
  """Single-qubit corrections.  The value's bits are (x, z)."""

  I = 0
  Z = 1
  X = 2
  IY = 3

  @property
  def token(self) -> str:
    return 'iY' if self == PauliOp.IY else self.name

  @classmethod
  def from_token(cls, token: str) -> 'PauliOp':
    for op in cls:
      if op.token == token:
        return op
    raise ValueError(f'Unknown Pauli operator {token!r}.')

  @property
  def matrix(self) -> np.ndarray:
    return _PAULI_MATRICES[self]


# iY keeps its phase: i * [[0, -i], [i, 0]] = [[0, 1], [-1, 0]].
_PAULI_MATRICES = {
    PauliOp.I: sv.SINGLE_QUBIT_MATRICES[sv.GateKind.I],
    PauliOp.Z: sv.SINGLE_QUBIT_MATRICES[sv.GateKind.Z],
    PauliOp.X: sv.SINGLE_QUBIT_MATRICES[sv.GateKind.X],
    PauliOp.IY: 1j * sv.SINGLE_QUBIT_MATRICES[sv.GateKind.Y],
}


@dataclasses.dataclass(frozen=True)
class PauliCorrection:
  """Bob's operator pair: `on_b1` acts on B1, `on_b2` on B2."""

  on_b1: PauliOp
  on_b2: PauliOp

  @property
  def tokens(self) -> List[str]:
    return [self.on_b1.token, self.on_b2.token]

  @property
  def num_gates(self) -> int:
    """Non-identity single-qubit gates Bob has to apply."""
    return int(self.on_b1 != PauliOp.I) + int(self.on_b2 != PauliOp.I)

  def matrix(self) -> np.ndarray:
    return np.kron(self.on_b1.matrix, self.on_b2.matrix)


@dataclasses.dataclass(frozen=True)
class Sampled:
  """Born-rule sampling from an explicitly passed generator."""

  rng: np.random.Generator


@dataclasses.dataclass(frozen=True)
class Forced:
  """Deterministic selection of one outcome; its probability is recorded."""

  label: BellLabel


MeasurementMode = Union[Sampled, Forced]
CorrectionTable = Dict[BellOutcome, PauliCorrection]


def bell_state(label: BellLabel, q1: str, q2: str) -> sv.StateVector:
  """Returns Phi+-, Psi+- on (q1, q2); Psi- = (|01> - |10>) / sqrt(2)."""
  if q1 == q2:
    raise sv.StateVectorError(f'Bell pair needs two distinct qubits, got {q1}.')
  return sv.StateVector((q1, q2), BELL_VECTORS[int(label)])


def _project(
    state: sv.StateVector,
    q1: str,
    q2: str,
) -> Tuple[np.ndarray, Tuple[str, ...]]:
  """Unnormalized Bell-basis branches of `state` on (q1, q2)."""
  if q1 == q2:
    raise sv.StateVectorError(f'Cannot measure qubit {q1} against itself.')
  state.axis(q1)
  state.axis(q2)
  rest = tuple(q for q in state.labels if q not in (q1, q2))
  mat = sv.permute_to(state, (q1, q2) + rest).amps.reshape(4, -1)
  return BELL_VECTORS.conj() @ mat, rest


def bell_probabilities(state: sv.StateVector, q1: str, q2: str) -> np.ndarray:
  """Born probabilities of the four Bell outcomes on (q1, q2)."""
  branches, _ = _project(state, q1, q2)
  return np.sum(np.abs(branches)**2, axis=1)


def bell_measure(
    state: sv.StateVector,
    q1: str,
    q2: str,
    mode: MeasurementMode,
    zero_probability: float = ZERO_PROBABILITY,
) -> Tuple[BellLabel, float, Optional[sv.StateVector]]:
  """Measures (q1, q2) in the Bell basis and removes them from the register.

  Args:
    state: the pre-measurement state.
    q1: first qubit of the measured pair.
    q2: second qubit of the measured pair.
    mode: `Sampled` draws by the Born rule from its generator; `Forced`
      selects the given outcome.
    zero_probability: forced outcomes at or below this probability are
      rejected.

  Returns:
    (label, probability, collapsed), where probability is the pre-collapse
    Born probability and collapsed is the renormalized state of the remaining
    qubits, or None when no qubits remain.

  Raises:
    ZeroProbabilityOutcomeError: if a forced outcome has probability
      <= zero_probability.
    StateVectorError: if q1 or q2 is not in the register.
  """
  branches, rest = _project(state, q1, q2)
  probs = np.sum(np.abs(branches)**2, axis=1)
  if isinstance(mode, Forced):
    label = BellLabel(mode.label)
    if probs[label] <= zero_probability:
      raise ZeroProbabilityOutcomeError(
          f'Outcome {label.token} on ({q1}, {q2}) has probability '
          f'{probs[label]:.3g}.')
  elif isinstance(mode, Sampled):
    label = BellLabel(int(mode.rng.choice(4, p=probs / probs.sum())))
  else:
    raise TypeError(f'Unknown measurement mode {mode!r}.')
  probability = float(probs[label])
  logging.debug('Bell measurement on (%s, %s): %s with p=%.6f', q1, q2,
                label.token, probability)
  if not rest:
    return label, probability, None
  collapsed = sv.normalized(rest, branches[label])
  return label, probability, collapsed


def correction_for(
    outcome: BellOutcome,
    channel: Tuple[BellLabel, BellLabel] = DEFAULT_CHANNEL,
) -> PauliCorrection:
  """Bob's correction for `outcome` over the given two-Bell-pair channel.

  For the Phi+ (x) Phi+ channel the map is Phi+ -> I, Phi- -> Z, Psi+ -> X,
  Psi- -> iY on each pair.  A channel pair sigma_s Phi+ shifts Bob's state by
  sigma_s, so the correction index is the outcome index XOR the channel index
  (Pauli products are exact up to a global phase).

  Args:
    outcome: Alice's joint measurement result.
    channel: the Bell states shared on (A1, B1) and (A2, B2).

  Returns:
    The operator pair to apply on (B1, B2).
  """
  first, second = channel
  return PauliCorrection(
      PauliOp(int(outcome.first) ^ int(first)),
      PauliOp(int(outcome.second) ^ int(second)),
  )


def correction_table(
    channel: Tuple[BellLabel, BellLabel] = DEFAULT_CHANNEL,
) -> CorrectionTable:
  return {outcome: correction_for(outcome, channel) for outcome in ALL_OUTCOMES}


def apply_correction(
    state: sv.StateVector,
    correction: PauliCorrection,
    b1: str,
    b2: str,
    inverse: bool = False,
) -> sv.StateVector:
  """Applies `correction` (or its inverse) to qubits b1 and b2."""
  for label, op in ((b1, correction.on_b1), (b2, correction.on_b2)):
    state.axis(label)
    if op == PauliOp.I:
      continue
    matrix = op.matrix.conj().T if inverse else op.matrix
    state = sv.apply_single_qubit_matrix(state, matrix, label)
  return state
