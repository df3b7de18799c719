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

"""Compress, teleport over two Bell pairs, and reconstruct.

The sender holds the eight-qubit state

  alpha|00000000> + beta|00100000> + gamma|11011111> + delta|11111111>

on qubits a..h.  A local circuit concentrates it onto (a, c), leaving b and
d..h in |0>.  The two-qubit state is teleported to (B1, B2) over
|phi+>_{A1 B1} |phi+>_{A2 B2} by Bell measurements on (a, A1) and (c, A2), and
the receiver rebuilds the eight-qubit state on (B1, B, B2, D, E, F, G, H) with
six |0> ancillas and the inverse circuit.
"""

import dataclasses
import enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from absl import logging
import numpy as np

from twobell import bell
from twobell import statevector as sv

DATA_LABELS = ('a', 'b', 'c', 'd', 'e', 'f', 'g', 'h')
PAIR_LABELS = ('a', 'c')
RESIDUAL_LABELS = ('b', 'd', 'e', 'f', 'g', 'h')
CHANNEL_LABELS = ('A1', 'B1', 'A2', 'B2')
BOB_LABELS = ('B1', 'B2')
ANCILLA_LABELS = ('B', 'D', 'E', 'F', 'G', 'H')
RECEIVER_LABELS = ('B1', 'B', 'B2', 'D', 'E', 'F', 'G', 'H')
CLUSTER_LABELS = ('1', '2', '3', '4', '5', '6')

# Sender qubit -> receiver qubit.
RECEIVER_MAP = dict(zip(DATA_LABELS, RECEIVER_LABELS))

ENCODING_SUPPORT = ('00000000', '00100000', '11011111', '11111111')
STAGE_ONE_SUPPORT = ('0000', '0010', '1101', '1111')  # over (a, b, c, d)
CLUSTER_SUPPORT = ('000000', '001001', '110110', '111111')

AUTONORMALIZE_TOLERANCE = 1e-6
FIDELITY_TOLERANCE = 1e-10
BELL_MEASUREMENTS = 2


class CoefficientError(ValueError):
  """Raised for coefficient sets that cannot describe a normalized state."""


class ConstructibilityError(ValueError):
  """Raised when a channel definition depends on the unknown coefficients."""


class FactorizationError(ValueError):
  """Raised when compression does not leave (a, c) in a product state."""


@dataclasses.dataclass(frozen=True)
class CoefficientSet:
  """The four unknown amplitudes (alpha, beta, gamma, delta)."""

  alpha: complex
  beta: complex
  gamma: complex
  delta: complex

  def __post_init__(self):
    for field in ('alpha', 'beta', 'gamma', 'delta'):
      value = complex(getattr(self, field))
      if not np.isfinite(value):
        raise CoefficientError(f'{field} is not finite: {value!r}.')
      object.__setattr__(self, field, value)
    norm_sq = float(np.sum(np.abs(self.as_array())**2))
    if abs(norm_sq - 1.0) > sv.NORM_TOLERANCE:
      raise CoefficientError(
          f'|alpha|^2+|beta|^2+|gamma|^2+|delta|^2 = {norm_sq!r}; use '
          'CoefficientSet.from_values to auto-normalize.')

  def as_array(self) -> np.ndarray:
    return np.array([self.alpha, self.beta, self.gamma, self.delta],
                    dtype=np.complex128)

  def to_pairs(self) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in self.as_array()]

  @classmethod
  def from_values(
      cls,
      values: Sequence[complex],
      autonormalize_tolerance: float = AUTONORMALIZE_TOLERANCE,
  ) -> 'CoefficientSet':
    """Builds a set, rescaling inputs whose norm is within tolerance of 1.

    Args:
      values: alpha, beta, gamma, delta.
      autonormalize_tolerance: maximum |norm - 1| that is silently corrected.

    Returns:
      The normalized coefficient set.

    Raises:
      CoefficientError: for the wrong count, non-finite values, zero norm, or a
        norm further than `autonormalize_tolerance` from 1.
    """
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    if values.shape != (4,):
      raise CoefficientError(f'Expected 4 coefficients, got {values.shape[0]}.')
    if not np.all(np.isfinite(values)):
      raise CoefficientError('Coefficients must be finite.')
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
      raise CoefficientError('Coefficient set has zero norm.')
    if abs(norm - 1.0) > autonormalize_tolerance:
      raise CoefficientError(
          f'Coefficient norm {norm:.9g} is not within '
          f'{autonormalize_tolerance:g} of 1.')
    if abs(norm - 1.0) > sv.NORM_TOLERANCE:
      logging.warning('Auto-normalizing coefficients with norm %.12g.', norm)
    return cls(*(values / norm))

  @classmethod
  def from_reals(
      cls,
      reals: Sequence[float],
      autonormalize_tolerance: float = AUTONORMALIZE_TOLERANCE,
  ) -> 'CoefficientSet':
    """Parses 8 reals as (re, im) pairs of alpha, beta, gamma, delta."""
    if len(reals) != 8:
      raise CoefficientError(
          f'Expected 8 reals (4 re,im pairs), got {len(reals)}.')
    values = [complex(reals[i], reals[i + 1]) for i in range(0, 8, 2)]
    return cls.from_values(values, autonormalize_tolerance)

  @classmethod
  def random(cls, rng: np.random.Generator) -> 'CoefficientSet':
    """Haar-random coefficients drawn from `rng`."""
    values = rng.normal(size=4) + 1j * rng.normal(size=4)
    return cls(*(values / np.linalg.norm(values)))


class ChannelKind(enum.Enum):
  BELL_PAIRS = 'bell-pairs'
  CLUSTER = 'cluster'
  # A six-qubit "channel" whose amplitudes are the unknown coefficients.
  COEFFICIENT_WEIGHTED_CLUSTER = 'coefficient-weighted-cluster'


@dataclasses.dataclass(frozen=True)
class ChannelSpec:
  """A shared resource state.  `bell_pair` applies to BELL_PAIRS only."""

  kind: ChannelKind = ChannelKind.BELL_PAIRS
  bell_pair: Tuple[bell.BellLabel, bell.BellLabel] = bell.DEFAULT_CHANNEL

  def __post_init__(self):
    object.__setattr__(self, 'bell_pair',
                       tuple(bell.BellLabel(b) for b in self.bell_pair))

  @property
  def parameter_dependence(self) -> bool:
    """Whether the definition references alpha, beta, gamma, delta."""
    return self.kind == ChannelKind.COEFFICIENT_WEIGHTED_CLUSTER

  @property
  def num_qubits(self) -> int:
    return len(CHANNEL_LABELS) if self.kind == ChannelKind.BELL_PAIRS else len(
        CLUSTER_LABELS)

  @property
  def bell_pairs(self) -> int:
    return 2 if self.kind == ChannelKind.BELL_PAIRS else 0

  @property
  def token(self) -> str:
    if self.kind == ChannelKind.BELL_PAIRS:
      return ':'.join(b.token for b in self.bell_pair)
    return self.kind.value

  @classmethod
  def from_token(cls, token: str) -> 'ChannelSpec':
    """Parses 'phi+:psi-' style pairs or a ChannelKind value."""
    for kind in ChannelKind:
      if token == kind.value and kind != ChannelKind.BELL_PAIRS:
        return cls(kind)
    outcome = bell.BellOutcome.from_token(token)
    return cls(ChannelKind.BELL_PAIRS, (outcome.first, outcome.second))


def is_constructible(spec: ChannelSpec) -> bool:
  return not spec.parameter_dependence


def _support_state(
    labels: Sequence[str],
    support: Sequence[str],
    values: Sequence[complex],
) -> sv.StateVector:
  amps = np.zeros(2**len(labels), dtype=np.complex128)
  for bits, value in zip(support, values):
    amps[int(bits, 2)] = value
  return sv.StateVector(tuple(labels), amps)


def encode_input(c: CoefficientSet) -> sv.StateVector:
  """The eight-qubit state on a..h carrying the four coefficients."""
  return _support_state(DATA_LABELS, ENCODING_SUPPORT, c.as_array())


def build_channel(spec: ChannelSpec) -> sv.StateVector:
  """Prepares the channel state.  Takes no coefficients by construction.

  Args:
    spec: which channel to build.

  Returns:
    The Bell-pair product on (A1, B1, A2, B2), or the uniform six-qubit cluster
    state on qubits 1..6.

  Raises:
    ConstructibilityError: if the channel definition depends on the unknown
      coefficients of the state being teleported.
  """
  if spec.parameter_dependence:
    raise ConstructibilityError(
        'This channel cannot be prepared: its amplitudes are the coefficients '
        'alpha, beta, gamma, delta of the state to be teleported, which are '
        'unknown to both parties.')
  if spec.kind == ChannelKind.CLUSTER:
    return _support_state(CLUSTER_LABELS, CLUSTER_SUPPORT, [0.5] * 4)
  first, second = spec.bell_pair
  return sv.tensor(
      bell.bell_state(first, 'A1', 'B1'),
      bell.bell_state(second, 'A2', 'B2'),
  )


class CompressionVariant(enum.Enum):
  """Second-stage compression gate lists.

  TWO_CNOT applies CNOT a->b then CNOT a->d.  LITERAL applies the printed
  product CNOT_{a->d} CNOT_{a->b} SWAP_{bc} read rightmost-first, which does
  not factor (a, c) out for generic coefficients.
  """

  TWO_CNOT = 'two-cnot'
  LITERAL = 'literal'

  @classmethod
  def from_token(cls, token: str) -> 'CompressionVariant':
    """Parses a CLI token; 'paper-literal' is accepted for LITERAL."""
    token = token.strip().lower()
    if token == 'paper-literal':
      return cls.LITERAL
    try:
      return cls(token)
    except ValueError:
      raise ValueError(
          f'Unknown compression variant {token!r}; expected one of '
          f'{[v.value for v in cls]}.') from None


# The compression identity as a printed operator product (rightmost first).
COMPRESSION_OPERATOR_PRODUCT = (
    sv.cnot('a', 'd'),
    sv.cnot('a', 'b'),
    sv.swap('b', 'c'),
)


def from_operator_product(
    ops: Sequence[sv.GateOp],
    register: Optional[Sequence[str]] = None,
) -> sv.Circuit:
  """Converts operator-product order (rightmost acts first) to diagram order."""
  return sv.Circuit(tuple(reversed(ops)),
                    tuple(register) if register is not None else None)


def stage_one_circuit() -> sv.Circuit:
  """CNOT a->e, a->f, a->g, a->h: e..h copy qubit a in every basis term."""
  return sv.Circuit(
      tuple(sv.cnot('a', target) for target in ('e', 'f', 'g', 'h')),
      DATA_LABELS,
  )


def stage_two_circuit(variant: CompressionVariant) -> sv.Circuit:
  if variant == CompressionVariant.TWO_CNOT:
    return sv.Circuit((sv.cnot('a', 'b'), sv.cnot('a', 'd')), DATA_LABELS)
  return from_operator_product(COMPRESSION_OPERATOR_PRODUCT, DATA_LABELS)


def compression_circuit(
    variant: CompressionVariant = CompressionVariant.TWO_CNOT,
) -> sv.Circuit:
  return stage_one_circuit().then(stage_two_circuit(variant))


def _check_encoding_family(state8: sv.StateVector) -> sv.StateVector:
  if set(state8.labels) != set(DATA_LABELS):
    raise FactorizationError(
        f'Expected qubits {list(DATA_LABELS)}, got {list(state8.labels)}.')
  state8 = sv.permute_to(state8, DATA_LABELS)
  weights = np.abs(state8.amps)**2
  outside = 1.0 - sum(weights[int(bits, 2)] for bits in ENCODING_SUPPORT)
  if outside > sv.NORM_TOLERANCE:
    raise FactorizationError(
        f'Input has weight {outside:.3g} outside the four-term encoding '
        'support.')
  return state8


def compress(
    state8: sv.StateVector,
    variant: CompressionVariant = CompressionVariant.TWO_CNOT,
    tolerance: float = sv.FACTOR_TOLERANCE,
) -> Tuple[sv.StateVector, sv.StateVector]:
  """Concentrates an encoded state onto (a, c).

  Args:
    state8: a state of the four-term encoding family on a..h.
    variant: second-stage gate list.
    tolerance: factorization tolerance (1 - leading Schmidt weight).

  Returns:
    (psi2 on (a, c), residual on (b, d, e, f, g, h)); the residual is |000000>.

  Raises:
    FactorizationError: if the input is outside the encoding family, or the
      circuit leaves (a, c) entangled with the rest or the rest not in |0>.
  """
  state8 = _check_encoding_family(state8)
  compressed = sv.apply_circuit(state8, compression_circuit(variant))
  factors = sv.factorize(compressed, PAIR_LABELS, tolerance)
  if factors is None:
    raise FactorizationError(
        f'The {variant.value} compression circuit leaves (a, c) entangled '
        'with the remaining qubits.')
  psi2, residual = factors
  zeros = sv.make_basis_state(RESIDUAL_LABELS, '0' * len(RESIDUAL_LABELS))
  if sv.fidelity(zeros, residual) < 1.0 - tolerance:
    raise FactorizationError(
        f'The {variant.value} compression circuit does not return '
        f'{list(RESIDUAL_LABELS)} to |0>.')
  logging.debug('Compressed to psi2 = %s', psi2.amps)
  return psi2, residual


@dataclasses.dataclass(frozen=True)
class ForcedPair:
  """Forces both Bell measurement outcomes."""

  outcome: bell.BellOutcome


@dataclasses.dataclass(frozen=True)
class SeededSampling:
  """Born-rule sampling from np.random.default_rng(seed)."""

  seed: int


@dataclasses.dataclass(frozen=True)
class TeleportLeg:
  """The classical record of one two-qubit teleportation."""

  outcome: bell.BellOutcome
  correction: bell.PauliCorrection
  probability: float
  classical_bits_sent: int


def teleport_two_qubit(
    psi2: sv.StateVector,
    channel: ChannelSpec = ChannelSpec(),
    mode: Union[bell.Sampled, ForcedPair, None] = None,
    table: Optional[bell.CorrectionTable] = None,
    measure_first_pair_first: bool = True,
    zero_probability: float = bell.ZERO_PROBABILITY,
) -> Tuple[sv.StateVector, TeleportLeg]:
  """Teleports psi2 on (a, c) to Bob's (B1, B2).

  Args:
    psi2: normalized state on qubits a and c.
    channel: a constructible Bell-pair channel.
    mode: `bell.Sampled` for Born-rule sampling, `ForcedPair` to pick the
      branch.  Defaults to sampling from a generator seeded with 0.
    table: outcome -> correction map; defaults to the channel's own table.
    measure_first_pair_first: measure (a, A1) before (c, A2).  The outcome
      statistics do not depend on the order.
    zero_probability: forced outcomes at or below this probability raise.

  Returns:
    (Bob's corrected state on (B1, B2), classical record).

  Raises:
    ConstructibilityError: for channels that cannot be prepared.
    ValueError: for non Bell-pair channels.
    bell.ZeroProbabilityOutcomeError: for impossible forced outcomes.
  """
  if set(psi2.labels) != set(PAIR_LABELS):
    raise sv.StateVectorError(
        f'Expected a state on {list(PAIR_LABELS)}, got {list(psi2.labels)}.')
  if not is_constructible(channel):
    build_channel(channel)  # Raises with the explanation.
  if channel.kind != ChannelKind.BELL_PAIRS:
    raise ValueError(f'Channel {channel.token} is not a Bell-pair product.')
  if mode is None:
    mode = bell.Sampled(np.random.default_rng(0))
  if table is None:
    table = bell.correction_table(channel.bell_pair)

  state = sv.tensor(sv.permute_to(psi2, PAIR_LABELS), build_channel(channel))
  pairs = [('a', 'A1'), ('c', 'A2')]
  order = [0, 1] if measure_first_pair_first else [1, 0]
  labels = [None, None]
  probability = 1.0
  for i in order:
    if isinstance(mode, ForcedPair):
      pair_mode = bell.Forced(
          mode.outcome.first if i == 0 else mode.outcome.second)
    else:
      pair_mode = mode
    labels[i], p, state = bell.bell_measure(state, *pairs[i], pair_mode,
                                            zero_probability)
    probability *= p

  outcome = bell.BellOutcome(labels[0], labels[1])
  correction = table[outcome]
  bob = bell.apply_correction(sv.permute_to(state, BOB_LABELS), correction,
                              'B1', 'B2')
  leg = TeleportLeg(
      outcome=outcome,
      correction=correction,
      probability=probability,
      classical_bits_sent=BELL_MEASUREMENTS *
      bell.CLASSICAL_BITS_PER_MEASUREMENT,
  )
  return bob, leg


def reconstruct(
    bob: sv.StateVector,
    variant: CompressionVariant = CompressionVariant.TWO_CNOT,
) -> sv.StateVector:
  """Rebuilds the eight-qubit state on (B1, B, B2, D, E, F, G, H)."""
  if set(bob.labels) != set(BOB_LABELS):
    raise sv.StateVectorError(
        f'Expected a state on {list(BOB_LABELS)}, got {list(bob.labels)}.')
  ancillas = sv.make_basis_state(ANCILLA_LABELS, '0' * len(ANCILLA_LABELS))
  state = sv.permute_to(
      sv.tensor(sv.permute_to(bob, BOB_LABELS), ancillas), RECEIVER_LABELS)
  circuit = compression_circuit(variant).inverse().relabel(RECEIVER_MAP)
  return sv.apply_circuit(state, circuit)


@dataclasses.dataclass(frozen=True)
class TeleportTranscript:
  """Full record of one protocol run."""

  coefficients: CoefficientSet
  outcome: bell.BellOutcome
  correction: bell.PauliCorrection
  classical_bits_sent: int
  fidelity_2q: float
  fidelity_8q: float
  probability: float
  seed: Optional[int]
  trial_index: int
  forced: bool
  variant: CompressionVariant
  channel: ChannelSpec
  bell_pairs_used: int = 2
  final_state: Optional[sv.StateVector] = dataclasses.field(
      default=None, repr=False, compare=False)

  def to_dict(self) -> Dict[str, Any]:
    return {
        'coefficients': self.coefficients.to_pairs(),
        'outcome': self.outcome.tokens,
        'correction': self.correction.tokens,
        'classical_bits_sent': self.classical_bits_sent,
        'fidelity_2q': self.fidelity_2q,
        'fidelity_8q': self.fidelity_8q,
        'probability': self.probability,
        'seed': self.seed,
        'trial_index': self.trial_index,
        'forced': self.forced,
        'variant': self.variant.value,
        'channel': self.channel.token,
        'bell_pairs': self.bell_pairs_used,
    }


def _run(
    c: CoefficientSet,
    mode: Union[bell.Sampled, ForcedPair],
    variant: CompressionVariant,
    channel: ChannelSpec,
    table: Optional[bell.CorrectionTable],
    seed: Optional[int],
    trial_index: int,
    factor_tolerance: float,
    zero_probability: float,
) -> TeleportTranscript:
  state8 = encode_input(c)
  psi2, _ = compress(state8, variant, factor_tolerance)
  bob, leg = teleport_two_qubit(
      psi2, channel, mode, table, zero_probability=zero_probability)
  fidelity_2q = sv.fidelity(sv.relabel(psi2, {'a': 'B1', 'c': 'B2'}), bob)
  final = reconstruct(bob, variant)
  fidelity_8q = sv.fidelity(sv.relabel(state8, RECEIVER_MAP), final)
  logging.debug('Trial %d: outcome %s, fidelity %.15f', trial_index,
                leg.outcome.token, fidelity_8q)
  return TeleportTranscript(
      coefficients=c,
      outcome=leg.outcome,
      correction=leg.correction,
      classical_bits_sent=leg.classical_bits_sent,
      fidelity_2q=fidelity_2q,
      fidelity_8q=fidelity_8q,
      probability=leg.probability,
      seed=seed,
      trial_index=trial_index,
      forced=isinstance(mode, ForcedPair),
      variant=variant,
      channel=channel,
      bell_pairs_used=channel.bell_pairs,
      final_state=final,
  )


def run_end_to_end(
    c: CoefficientSet,
    mode: Union[SeededSampling, ForcedPair],
    variant: CompressionVariant = CompressionVariant.TWO_CNOT,
    channel: ChannelSpec = ChannelSpec(),
    table: Optional[bell.CorrectionTable] = None,
    factor_tolerance: float = sv.FACTOR_TOLERANCE,
    zero_probability: float = bell.ZERO_PROBABILITY,
) -> TeleportTranscript:
  """Encode, compress, teleport and reconstruct one coefficient set.

  Args:
    c: the coefficients to teleport.
    mode: `SeededSampling` or `ForcedPair`.
    variant: compression gate list used by sender and receiver.
    channel: the Bell-pair channel.
    table: optional correction table override.
    factor_tolerance: passed to `compress`.
    zero_probability: passed to the Bell measurements.

  Returns:
    The transcript, with fidelity_8q measured against the encoded input
    relabeled onto the receiver's qubits.
  """
  if isinstance(mode, SeededSampling):
    return _run(c, bell.Sampled(np.random.default_rng(mode.seed)), variant,
                channel, table, mode.seed, 0, factor_tolerance,
                zero_probability)
  return _run(c, mode, variant, channel, table, None, 0, factor_tolerance,
              zero_probability)


def run_trial(
    seed: int,
    trial_index: int,
    coefficients: Optional[CoefficientSet] = None,
    forced: Optional[bell.BellOutcome] = None,
    variant: CompressionVariant = CompressionVariant.TWO_CNOT,
    channel: ChannelSpec = ChannelSpec(),
    table: Optional[bell.CorrectionTable] = None,
    factor_tolerance: float = sv.FACTOR_TOLERANCE,
    zero_probability: float = bell.ZERO_PROBABILITY,
) -> TeleportTranscript:
  """One reproducible batch trial driven by np.random.default_rng(seed + k).

  The trial generator draws the coefficients first (when none are given) and
  then the measurement outcomes, so (seed, trial_index) replays a trial
  exactly.
  """
  rng = np.random.default_rng(seed + trial_index)
  if coefficients is None:
    coefficients = CoefficientSet.random(rng)
  mode = ForcedPair(forced) if forced is not None else bell.Sampled(rng)
  return _run(coefficients, mode, variant, channel, table, seed, trial_index,
              factor_tolerance, zero_probability)
