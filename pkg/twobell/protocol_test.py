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

"""Tests for protocol."""

import json

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from twobell import bell
from twobell import protocol
from twobell import statevector as sv

_L = bell.BellLabel
_V = protocol.CompressionVariant


def _basis(k: int) -> protocol.CoefficientSet:
  return protocol.CoefficientSet(*np.eye(4)[k])


class CoefficientSetTest(parameterized.TestCase):

  def test_normalized(self):
    c = protocol.CoefficientSet(0.5, 0.5, 0.5, 0.5)
    self.assertEqual(c.alpha, 0.5 + 0j)

  def test_rejects_unnormalized(self):
    with self.assertRaises(protocol.CoefficientError):
      protocol.CoefficientSet(1, 0, 0, 1)

  def test_autonormalize_within_tolerance(self):
    c = protocol.CoefficientSet.from_values([1 + 5e-7, 0, 0, 0])
    self.assertAlmostEqual(abs(c.alpha), 1.0, delta=1e-15)

  @parameterized.named_parameters(
      ('norm_sqrt2', [1, 0, 0, 1]),
      ('zero', [0, 0, 0, 0]),
      ('non_finite', [np.inf, 0, 0, 0]),
      ('too_few', [1, 0, 0]),
  )
  def test_from_values_rejects(self, values):
    with self.assertRaises(protocol.CoefficientError):
      protocol.CoefficientSet.from_values(values)

  def test_from_reals(self):
    c = protocol.CoefficientSet.from_reals([0, 0, 0, 1, 0, 0, 0, 0])
    self.assertEqual(c.beta, 1j)
    with self.assertRaises(protocol.CoefficientError):
      protocol.CoefficientSet.from_reals([1, 0, 0, 0])

  def test_random_is_seeded(self):
    a = protocol.CoefficientSet.random(np.random.default_rng(3))
    b = protocol.CoefficientSet.random(np.random.default_rng(3))
    self.assertEqual(a, b)
    self.assertAlmostEqual(
        float(np.sum(np.abs(a.as_array())**2)), 1.0, delta=1e-12)


class EncodeAndChannelTest(parameterized.TestCase):

  def test_encode_alpha(self):
    state = protocol.encode_input(_basis(0))
    self.assertEqual(state.amplitude('00000000'), 1.0)

  def test_encode_gamma(self):
    state = protocol.encode_input(_basis(2))
    self.assertEqual(state.amplitude('11011111'), 1.0)

  def test_encode_uniform(self):
    state = protocol.encode_input(protocol.CoefficientSet(0.5, 0.5, 0.5, 0.5))
    nonzero = np.flatnonzero(np.abs(state.amps) > 0)
    self.assertEqual(list(nonzero), [0b00000000, 0b00100000, 0b11011111, 255])
    np.testing.assert_allclose(state.amps[nonzero], 0.5)

  def test_bell_pair_channel(self):
    state = protocol.build_channel(protocol.ChannelSpec())
    self.assertEqual(state.labels, protocol.CHANNEL_LABELS)
    expected = np.zeros(16)
    expected[[0b0000, 0b0011, 0b1100, 0b1111]] = 0.5
    np.testing.assert_allclose(state.amps, expected, atol=1e-15)

  def test_cluster_channel(self):
    state = protocol.build_channel(
        protocol.ChannelSpec(protocol.ChannelKind.CLUSTER))
    for bits in ('000000', '001001', '110110', '111111'):
      self.assertEqual(state.amplitude(bits), 0.5)

  def test_coefficient_weighted_channel_is_not_constructible(self):
    spec = protocol.ChannelSpec(
        protocol.ChannelKind.COEFFICIENT_WEIGHTED_CLUSTER)
    self.assertTrue(spec.parameter_dependence)
    self.assertFalse(protocol.is_constructible(spec))
    with self.assertRaisesRegex(protocol.ConstructibilityError, 'unknown'):
      protocol.build_channel(spec)

  def test_channel_tokens(self):
    spec = protocol.ChannelSpec.from_token('psi-:phi+')
    self.assertEqual(spec.bell_pair, (_L.PSI_MINUS, _L.PHI_PLUS))
    self.assertEqual(spec.token, 'psi-:phi+')
    self.assertEqual(
        protocol.ChannelSpec.from_token('cluster').kind,
        protocol.ChannelKind.CLUSTER)


class CompressionTest(parameterized.TestCase):

  def test_circuit_gate_lists(self):
    self.assertEqual(
        str(protocol.compression_circuit(_V.TWO_CNOT)),
        'CNOT(a->e) CNOT(a->f) CNOT(a->g) CNOT(a->h) CNOT(a->b) CNOT(a->d)')
    self.assertEqual(
        str(protocol.compression_circuit(_V.LITERAL)),
        'CNOT(a->e) CNOT(a->f) CNOT(a->g) CNOT(a->h) SWAP(b,c) CNOT(a->b) '
        'CNOT(a->d)')

  @parameterized.parameters('literal', ' LITERAL ', 'paper-literal')
  def test_variant_tokens(self, token):
    self.assertEqual(_V.from_token(token), _V.LITERAL)

  def test_stage_one(self):
    rng = np.random.default_rng(0)
    for _ in range(20):
      c = protocol.CoefficientSet.random(rng)
      out = sv.apply_circuit(
          protocol.encode_input(c), protocol.stage_one_circuit())
      amps = out.amps.reshape(16, 16)  # (abcd, efgh)
      np.testing.assert_allclose(amps[:, 1:], 0, atol=1e-12)
      expected = np.zeros(16, np.complex128)
      expected[[0b0000, 0b0010, 0b1101, 0b1111]] = c.as_array()
      np.testing.assert_allclose(amps[:, 0], expected, atol=1e-12)

  def test_uniform_compresses_to_product(self):
    state = sv.apply_circuit(
        protocol.encode_input(protocol.CoefficientSet(0.5, 0.5, 0.5, 0.5)),
        protocol.compression_circuit())
    is_product, factor = sv.product_check(state, {'a', 'c'})
    self.assertTrue(is_product)
    np.testing.assert_allclose(factor.amps, 0.5, atol=1e-12)

  def test_compress_basis_terms(self):
    psi2, residual = protocol.compress(protocol.encode_input(_basis(0)))
    self.assertEqual(psi2.labels, ('a', 'c'))
    np.testing.assert_allclose(psi2.amps, [1, 0, 0, 0], atol=1e-12)
    self.assertEqual(residual.labels, protocol.RESIDUAL_LABELS)
    psi2, _ = protocol.compress(protocol.encode_input(_basis(1)))
    np.testing.assert_allclose(psi2.amps, [0, 1, 0, 0], atol=1e-12)

  def test_compress_random_recovers_coefficients(self):
    rng = np.random.default_rng(1)
    for _ in range(100):
      c = protocol.CoefficientSet.random(rng)
      psi2, residual = protocol.compress(protocol.encode_input(c))
      np.testing.assert_allclose(psi2.amps, c.as_array(), atol=1e-12)
      np.testing.assert_allclose(residual.amps[0], 1.0, atol=1e-12)

  def test_literal_variant_fails_for_generic_coefficients(self):
    c = protocol.CoefficientSet.random(np.random.default_rng(2))
    with self.assertRaises(protocol.FactorizationError):
      protocol.compress(protocol.encode_input(c), _V.LITERAL)
    state = sv.apply_circuit(
        protocol.encode_input(c), protocol.compression_circuit(_V.LITERAL))
    self.assertFalse(sv.product_check(state, {'a', 'c'})[0])

  def test_compress_rejects_outside_family(self):
    state = sv.make_basis_state(protocol.DATA_LABELS, '10000000')
    with self.assertRaises(protocol.FactorizationError):
      protocol.compress(state)


class TeleportTest(parameterized.TestCase):

  def test_trivial_branch(self):
    psi2 = sv.make_basis_state(['a', 'c'], '00')
    bob, leg = protocol.teleport_two_qubit(
        psi2, mode=protocol.ForcedPair(bell.ALL_OUTCOMES[0]))
    self.assertEqual(bob.labels, protocol.BOB_LABELS)
    np.testing.assert_allclose(bob.amps, [1, 0, 0, 0], atol=1e-12)
    self.assertEqual(leg.correction,
                     bell.PauliCorrection(bell.PauliOp.I, bell.PauliOp.I))
    self.assertEqual(leg.classical_bits_sent, 4)
    self.assertAlmostEqual(leg.probability, 1 / 16, delta=1e-12)

  @parameterized.parameters(*range(16))
  def test_every_forced_outcome(self, index):
    rng = np.random.default_rng(100 + index)
    psi2 = sv.random_state(('a', 'c'), rng)
    outcome = bell.BellOutcome.from_index(index)
    bob, leg = protocol.teleport_two_qubit(
        psi2, mode=protocol.ForcedPair(outcome))
    self.assertEqual(leg.outcome, outcome)
    target = sv.relabel(psi2, {'a': 'B1', 'c': 'B2'})
    self.assertGreaterEqual(sv.fidelity(target, bob), 1 - 1e-10)

  def test_measurement_order_is_irrelevant(self):
    psi2 = sv.random_state(('a', 'c'), np.random.default_rng(5))
    for outcome in bell.ALL_OUTCOMES:
      mode = protocol.ForcedPair(outcome)
      bob_1, leg_1 = protocol.teleport_two_qubit(psi2, mode=mode)
      bob_2, leg_2 = protocol.teleport_two_qubit(
          psi2, mode=mode, measure_first_pair_first=False)
      np.testing.assert_allclose(bob_1.amps, bob_2.amps, atol=1e-12)
      self.assertAlmostEqual(leg_1.probability, leg_2.probability, delta=1e-12)

  def test_any_bell_pair_channel(self):
    psi2 = sv.random_state(('a', 'c'), np.random.default_rng(6))
    target = sv.relabel(psi2, {'a': 'B1', 'c': 'B2'})
    for first in bell.BellLabel:
      for second in bell.BellLabel:
        channel = protocol.ChannelSpec(protocol.ChannelKind.BELL_PAIRS,
                                       (first, second))
        for outcome in bell.ALL_OUTCOMES:
          bob, _ = protocol.teleport_two_qubit(psi2, channel,
                                               protocol.ForcedPair(outcome))
          self.assertGreaterEqual(sv.fidelity(target, bob), 1 - 1e-10)

  def test_rejects_non_constructible_channel(self):
    psi2 = sv.make_basis_state(['a', 'c'], '00')
    with self.assertRaises(protocol.ConstructibilityError):
      protocol.teleport_two_qubit(
          psi2,
          protocol.ChannelSpec(
              protocol.ChannelKind.COEFFICIENT_WEIGHTED_CLUSTER))
    with self.assertRaises(ValueError):
      protocol.teleport_two_qubit(
          psi2, protocol.ChannelSpec(protocol.ChannelKind.CLUSTER))

  def test_sampled_statistics(self):
    # 16000 Born-rule runs on one seeded generator; each outcome within 4 sigma.
    rng = np.random.default_rng(7)
    psi2 = sv.random_state(('a', 'c'), rng)
    mode = bell.Sampled(rng)
    n = 16000
    counts = np.zeros(16)
    for _ in range(n):
      _, leg = protocol.teleport_two_qubit(psi2, mode=mode)
      counts[leg.outcome.index] += 1
    sigma = np.sqrt(n * (1 / 16) * (15 / 16))
    self.assertTrue(np.all(counts > 0))
    self.assertLess(float(np.max(np.abs(counts - n / 16))), 4 * sigma)


class ReconstructTest(parameterized.TestCase):

  def test_zero_state(self):
    out = protocol.reconstruct(sv.make_basis_state(['B1', 'B2'], '00'))
    self.assertEqual(out.labels, protocol.RECEIVER_LABELS)
    self.assertEqual(out.amplitude('00000000'), 1.0)

  def test_inverts_compression_on_basis_terms(self):
    for k in range(4):
      state8 = protocol.encode_input(_basis(k))
      psi2, _ = protocol.compress(state8)
      out = protocol.reconstruct(sv.relabel(psi2, {'a': 'B1', 'c': 'B2'}))
      expected = sv.relabel(state8, protocol.RECEIVER_MAP)
      self.assertGreaterEqual(sv.fidelity(expected, out), 1 - 1e-10)

  def test_round_trip_random(self):
    rng = np.random.default_rng(8)
    for _ in range(100):
      state8 = protocol.encode_input(protocol.CoefficientSet.random(rng))
      psi2, _ = protocol.compress(state8)
      out = protocol.reconstruct(sv.relabel(psi2, {'a': 'B1', 'c': 'B2'}))
      expected = sv.relabel(state8, protocol.RECEIVER_MAP)
      self.assertGreaterEqual(sv.fidelity(expected, out), 1 - 1e-10)


class EndToEndTest(parameterized.TestCase):

  @parameterized.parameters(*range(16))
  def test_alpha_any_forced_outcome(self, index):
    transcript = protocol.run_end_to_end(
        _basis(0), protocol.ForcedPair(bell.BellOutcome.from_index(index)))
    self.assertAlmostEqual(transcript.fidelity_8q, 1.0, delta=1e-10)
    self.assertTrue(transcript.forced)
    self.assertIsNone(transcript.seed)

  def test_thousand_sampled_runs(self):
    for k in range(1000):
      transcript = protocol.run_trial(7, k)
      self.assertGreaterEqual(transcript.fidelity_8q, 1 - 1e-10)
      self.assertEqual(transcript.classical_bits_sent, 4)
      self.assertEqual(transcript.bell_pairs_used, 2)

  def test_zero_probability_is_forwarded(self):
    forced = bell.BellOutcome.from_index(5)
    protocol.run_trial(0, 0, forced=forced)
    # Each pair outcome has probability 1/4.
    with self.assertRaises(bell.ZeroProbabilityOutcomeError):
      protocol.run_trial(0, 0, forced=forced, zero_probability=0.3)

  def test_factor_tolerance_is_forwarded(self):
    with self.assertRaises(protocol.FactorizationError):
      protocol.run_trial(0, 0, variant=_V.LITERAL)
    transcript = protocol.run_trial(
        0, 0, variant=_V.LITERAL, factor_tolerance=1.0)
    self.assertEqual(transcript.variant, _V.LITERAL)

  def test_forced_branches_over_coefficients(self):
    rng = np.random.default_rng(9)
    for _ in range(100):
      c = protocol.CoefficientSet.random(rng)
      for outcome in bell.ALL_OUTCOMES:
        transcript = protocol.run_end_to_end(c, protocol.ForcedPair(outcome))
        self.assertGreaterEqual(transcript.fidelity_8q, 1 - 1e-10)
        self.assertGreaterEqual(transcript.fidelity_2q, 1 - 1e-10)

  def test_seeded_runs_repeat(self):
    c = protocol.CoefficientSet(0.5, 0.5, 0.5, 0.5)
    first = protocol.run_end_to_end(c, protocol.SeededSampling(3))
    second = protocol.run_end_to_end(c, protocol.SeededSampling(3))
    self.assertEqual(first.to_dict(), second.to_dict())
    self.assertEqual(first.seed, 3)

  def test_replay_by_trial_index(self):
    batch = [protocol.run_trial(11, k) for k in range(10)]
    replay = protocol.run_trial(11, 6)
    self.assertEqual(replay.to_dict(), batch[6].to_dict())

  def test_transcript_serializes(self):
    transcript = protocol.run_trial(0, 0)
    data = json.loads(json.dumps(transcript.to_dict()))
    self.assertLen(data['coefficients'], 4)
    self.assertLen(data['outcome'], 2)
    self.assertLen(data['correction'], 2)
    self.assertEqual(data['variant'], 'two-cnot')
    self.assertEqual(data['channel'], 'phi+:phi+')
    self.assertNotIn('final_state', data)

  def test_channel_never_reads_coefficients(self):
    # build_channel takes only the channel description; one state serves every input.
    first = protocol.build_channel(protocol.ChannelSpec())
    protocol.run_end_to_end(_basis(3), protocol.ForcedPair(bell.ALL_OUTCOMES[5]))
    second = protocol.build_channel(protocol.ChannelSpec())
    np.testing.assert_array_equal(first.amps, second.amps)


if __name__ == '__main__':
  absltest.main()
