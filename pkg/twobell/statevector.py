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

"""Dense statevector simulation over labeled qubits.

Bit ordering: labels[0] is the most significant bit of the basis index, so the
ket string '11011111' over labels (a, ..., h) is basis index 223.  Every index
computation in this package derives from that single rule.

StateVector values are immutable: operations return new states and only ever
mutate scratch copies they own.
"""

import dataclasses
import enum
from typing import Any, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

# The protocol needs at most 12 simultaneous qubits.
MAX_QUBITS = 16
NORM_TOLERANCE = 1e-12
FACTOR_TOLERANCE = 1e-10

_SQRT1_2 = 1.0 / np.sqrt(2.0)


class StateVectorError(ValueError):
  """Raised for malformed registers, amplitudes or gate operands."""


class GateKind(enum.Enum):
  """Supported gates.  All of them are Hermitian, hence self-inverse."""

  CNOT = 'CNOT'
  SWAP = 'SWAP'
  H = 'H'
  X = 'X'
  Y = 'Y'
  Z = 'Z'
  I = 'I'

  @property
  def num_operands(self) -> int:
    return 2 if self in (GateKind.CNOT, GateKind.SWAP) else 1


SINGLE_QUBIT_MATRICES = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.I: np.eye(2, dtype=np.complex128),
}


def _check_labels(labels: Sequence[str]) -> None:
  if len(set(labels)) != len(labels):
    raise StateVectorError(f'Duplicate qubit labels in {list(labels)}.')
  for label in labels:
    if not isinstance(label, str) or not label:
      raise StateVectorError(f'Qubit labels must be nonempty strings: {label!r}')


@dataclasses.dataclass(frozen=True)
class GateOp:
  """A gate acting on named qubits.  CNOT operands are (control, target)."""

  kind: GateKind
  operands: Tuple[str, ...]

  def __post_init__(self):
    operands = tuple(self.operands)
    if len(operands) != self.kind.num_operands:
      raise StateVectorError(
          f'{self.kind.value} takes {self.kind.num_operands} operand(s), got '
          f'{list(operands)}.')
    _check_labels(operands)
    object.__setattr__(self, 'operands', operands)

  def relabel(self, mapping: Mapping[str, str]) -> 'GateOp':
    return GateOp(self.kind, tuple(mapping.get(q, q) for q in self.operands))

  def __str__(self) -> str:
    if self.kind == GateKind.CNOT:
      return f'CNOT({self.operands[0]}->{self.operands[1]})'
    return f'{self.kind.value}({",".join(self.operands)})'


def cnot(control: str, target: str) -> GateOp:
  return GateOp(GateKind.CNOT, (control, target))


def swap(first: str, second: str) -> GateOp:
  return GateOp(GateKind.SWAP, (first, second))


@dataclasses.dataclass(frozen=True)
class Circuit:
  """An ordered gate list applied first-element-first (diagram order).

  Attributes:
    ops: the gates, in the order they act.
    register: optional declared register.  When given, every operand label
      must be drawn from it.
  """

  ops: Tuple[GateOp, ...] = ()
  register: Optional[Tuple[str, ...]] = None

  def __post_init__(self):
    object.__setattr__(self, 'ops', tuple(self.ops))
    if self.register is not None:
      register = tuple(self.register)
      _check_labels(register)
      object.__setattr__(self, 'register', register)
      for op in self.ops:
        for q in op.operands:
          if q not in register:
            raise StateVectorError(
                f'{op} uses qubit {q!r} outside register {list(register)}.')

  def __len__(self) -> int:
    return len(self.ops)

  def __iter__(self) -> Iterator[GateOp]:
    return iter(self.ops)

  def then(self, other: 'Circuit') -> 'Circuit':
    """Returns the circuit running `self` and then `other`."""
    if self.register != other.register:
      raise StateVectorError('Cannot concatenate circuits over different '
                             f'registers {self.register} and {other.register}.')
    return Circuit(self.ops + other.ops, self.register)

  def inverse(self) -> 'Circuit':
    # Each supported gate is its own inverse.
    return Circuit(tuple(reversed(self.ops)), self.register)

  def relabel(self, mapping: Mapping[str, str]) -> 'Circuit':
    register = None
    if self.register is not None:
      register = tuple(mapping.get(q, q) for q in self.register)
    return Circuit(tuple(op.relabel(mapping) for op in self.ops), register)

  def gate_counts(self) -> Dict[str, int]:
    counts = {}
    for op in self.ops:
      counts[op.kind.value] = counts.get(op.kind.value, 0) + 1
    return counts

  def __str__(self) -> str:
    return ' '.join(str(op) for op in self.ops) or '<empty>'


@dataclasses.dataclass(frozen=True, eq=False)
class StateVector:
  """A normalized pure state over an ordered register of named qubits.

  Attributes:
    labels: qubit names; labels[0] is the most significant index bit.
    amps: complex128 amplitudes of length 2**len(labels), read-only.
  """

  labels: Tuple[str, ...]
  amps: np.ndarray

  def __post_init__(self):
    labels = tuple(self.labels)
    _check_labels(labels)
    n = len(labels)
    if n < 1:
      raise StateVectorError('A state needs at least one qubit.')
    if n > MAX_QUBITS:
      raise StateVectorError(
          f'{n} qubits requested; dense states are capped at {MAX_QUBITS}.')
    amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
    if amps.shape != (2**n,):
      raise StateVectorError(
          f'{n} labels need {2**n} amplitudes, got {amps.shape[0]}.')
    if not np.all(np.isfinite(amps)):
      raise StateVectorError('Amplitudes must be finite.')
    norm_sq = float(np.vdot(amps, amps).real)
    if abs(norm_sq - 1.0) > NORM_TOLERANCE:
      raise StateVectorError(f'State is not normalized: norm^2 = {norm_sq!r}.')
    amps.setflags(write=False)
    object.__setattr__(self, 'labels', labels)
    object.__setattr__(self, 'amps', amps)

  @property
  def num_qubits(self) -> int:
    return len(self.labels)

  def axis(self, label: str) -> int:
    try:
      return self.labels.index(label)
    except ValueError:
      raise StateVectorError(
          f'Unknown qubit {label!r}; register is {list(self.labels)}.'
      ) from None

  def amplitude(self, bits: str) -> complex:
    if len(bits) != self.num_qubits:
      raise StateVectorError(
          f'Bit string {bits!r} does not match {self.num_qubits} qubits.')
    return complex(self.amps[_basis_index(bits)])

  def to_dict(self) -> Dict[str, Any]:
    return {
        'labels': list(self.labels),
        'amplitudes': [[float(a.real), float(a.imag)] for a in self.amps],
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> 'StateVector':
    amps = [complex(re, im) for re, im in data['amplitudes']]
    return cls(tuple(data['labels']), np.array(amps, dtype=np.complex128))


def _basis_index(bits: str) -> int:
  if not bits or any(b not in '01' for b in bits):
    raise StateVectorError(f'Invalid bit string {bits!r}.')
  return int(bits, 2)


def normalized(labels: Sequence[str], amps: np.ndarray) -> StateVector:
  """Builds a StateVector from amplitudes of any nonzero norm."""
  amps = np.asarray(amps, dtype=np.complex128)
  norm = np.linalg.norm(amps)
  if not np.isfinite(norm) or norm == 0:
    raise StateVectorError('Cannot normalize a zero or non-finite vector.')
  return StateVector(tuple(labels), amps / norm)


def make_basis_state(labels: Sequence[str], bits: str) -> StateVector:
  """Returns the computational basis state |bits> on `labels`."""
  labels = tuple(labels)
  if len(bits) != len(labels):
    raise StateVectorError(
        f'Bit string {bits!r} has {len(bits)} bits for {len(labels)} labels.')
  _check_labels(labels)
  amps = np.zeros(2**len(labels), dtype=np.complex128)
  amps[_basis_index(bits)] = 1.0
  return StateVector(labels, amps)


def random_state(labels: Sequence[str], rng: np.random.Generator) -> StateVector:
  """Samples a Haar-random pure state from the given generator."""
  dim = 2**len(labels)
  amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
  return normalized(labels, amps)


def _index(n: int, fixed: Mapping[int, int]) -> Tuple[Any, ...]:
  """Index tuple selecting the sub-block where axes take the given bits."""
  idx = [slice(None)] * n
  for axis, bit in fixed.items():
    idx[axis] = bit
  return tuple(idx)


def apply_single_qubit_matrix(
    state: StateVector,
    matrix: np.ndarray,
    label: str,
) -> StateVector:
  """Applies a 2x2 unitary to one qubit by index-pair stride updates."""
  matrix = np.asarray(matrix, dtype=np.complex128)
  if matrix.shape != (2, 2):
    raise StateVectorError(f'Expected a 2x2 matrix, got {matrix.shape}.')
  n = state.num_qubits
  q = state.axis(label)
  psi = state.amps.reshape((2,) * n)
  lo = psi[_index(n, {q: 0})]
  hi = psi[_index(n, {q: 1})]
  out = np.empty_like(psi)
  out[_index(n, {q: 0})] = matrix[0, 0] * lo + matrix[0, 1] * hi
  out[_index(n, {q: 1})] = matrix[1, 0] * lo + matrix[1, 1] * hi
  return StateVector(state.labels, out.reshape(-1))


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
  """Applies one gate.

  Args:
    state: input state; it is not modified.
    op: the gate.  Its operands must all be in `state.labels`.

  Returns:
    The state after the gate, over the same labels.

  Raises:
    StateVectorError: if an operand is not in the register.
  """
  axes = [state.axis(q) for q in op.operands]
  if op.kind in SINGLE_QUBIT_MATRICES:
    if op.kind == GateKind.I:
      return state
    return apply_single_qubit_matrix(
        state, SINGLE_QUBIT_MATRICES[op.kind], op.operands[0])

  n = state.num_qubits
  psi = state.amps.reshape((2,) * n)
  out = psi.copy()
  if op.kind == GateKind.CNOT:
    control, target = axes
    flip_from = _index(n, {control: 1, target: 0})
    flip_to = _index(n, {control: 1, target: 1})
  elif op.kind == GateKind.SWAP:
    first, second = axes
    flip_from = _index(n, {first: 0, second: 1})
    flip_to = _index(n, {first: 1, second: 0})
  else:
    raise StateVectorError(f'Unsupported gate {op.kind}.')
  out[flip_from] = psi[flip_to]
  out[flip_to] = psi[flip_from]
  return StateVector(state.labels, out.reshape(-1))


def apply_circuit(state: StateVector, circuit: Iterable[GateOp]) -> StateVector:
  """Applies gates in list order: the first element acts first."""
  for op in circuit:
    state = apply_gate(state, op)
  return state


def tensor(s1: StateVector, s2: StateVector, *more: StateVector) -> StateVector:
  """Kronecker product with labels concatenated left to right."""
  result = s1
  for other in (s2,) + more:
    overlap = set(result.labels) & set(other.labels)
    if overlap:
      raise StateVectorError(f'Cannot tensor states sharing {sorted(overlap)}.')
    result = StateVector(result.labels + other.labels,
                         np.kron(result.amps, other.amps))
  return result


def permute_to(state: StateVector, new_order: Sequence[str]) -> StateVector:
  """Reorders the register without changing the physical state.

  Args:
    state: the state to reorder.
    new_order: a permutation of `state.labels`.

  Returns:
    The same state, with labels in `new_order` and amplitudes reindexed.

  Raises:
    StateVectorError: if `new_order` is not a permutation of the labels.
  """
  new_order = tuple(new_order)
  if sorted(new_order) != sorted(state.labels):
    raise StateVectorError(
        f'{list(new_order)} is not a permutation of {list(state.labels)}.')
  if new_order == state.labels:
    return state
  n = state.num_qubits
  axes = [state.labels.index(q) for q in new_order]
  psi = np.transpose(state.amps.reshape((2,) * n), axes)
  return StateVector(new_order, psi.reshape(-1))


def relabel(state: StateVector, mapping: Mapping[str, str]) -> StateVector:
  """Renames qubits; labels missing from `mapping` keep their name."""
  return StateVector(tuple(mapping.get(q, q) for q in state.labels), state.amps)


def fidelity(s1: StateVector, s2: StateVector) -> float:
  """Returns |<s1|s2>|^2, aligning s2 to the label order of s1."""
  if set(s1.labels) != set(s2.labels):
    raise StateVectorError(
        f'Label sets differ: {list(s1.labels)} vs {list(s2.labels)}.')
  aligned = permute_to(s2, s1.labels)
  overlap = np.vdot(s1.amps, aligned.amps)
  return float(min(1.0, abs(overlap)**2))


def _split_labels(
    state: StateVector,
    part: Iterable[str],
) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
  part = set(part)
  unknown = part - set(state.labels)
  if unknown:
    raise StateVectorError(f'Unknown qubits {sorted(unknown)}.')
  if not part or len(part) == state.num_qubits:
    raise StateVectorError('Subset must be a nonempty proper subset of '
                           f'{list(state.labels)}, got {sorted(part)}.')
  inside = tuple(q for q in state.labels if q in part)
  outside = tuple(q for q in state.labels if q not in part)
  return inside, outside


def factorize(
    state: StateVector,
    part: Iterable[str],
    tolerance: float = FACTOR_TOLERANCE,
) -> Optional[Tuple[StateVector, StateVector]]:
  """Splits `state` into a product over `part` and its complement.

  The phase is fixed so that the largest amplitude of the complementary factor
  is real and positive; a product with a basis-state complement therefore
  returns the `part` amplitudes verbatim.

  Args:
    state: the state to split.
    part: a nonempty proper subset of the labels.
    tolerance: maximum allowed 1 - s0^2, where s0 is the leading Schmidt
      coefficient.

  Returns:
    (factor on part, factor on the rest), labels kept in register order, or
    None when the state is entangled across the cut.
  """
  inside, outside = _split_labels(state, part)
  mat = permute_to(state, inside + outside).amps.reshape(2**len(inside), -1)
  u, s, vh = np.linalg.svd(mat, full_matrices=False)
  if 1.0 - s[0]**2 > tolerance:
    return None
  factor = u[:, 0]
  rest = vh[0, :] * s[0]
  pivot = int(np.argmax(np.abs(rest)))
  phase = rest[pivot] / abs(rest[pivot])
  return (normalized(inside, factor * phase), normalized(outside, rest / phase))


def product_check(
    state: StateVector,
    part: Iterable[str],
    tolerance: float = FACTOR_TOLERANCE,
) -> Tuple[bool, Optional[StateVector]]:
  """Tests whether `state` factors across `part`; returns the part factor."""
  factors = factorize(state, part, tolerance)
  if factors is None:
    return False, None
  return True, factors[0]
