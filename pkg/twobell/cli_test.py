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

"""Tests for cli."""

import io
import json
from unittest import mock

from absl import app
from absl import flags
from absl.testing import absltest
from absl.testing import flagsaver
from absl.testing import parameterized

from twobell import bell
from twobell import cli
from twobell import protocol

FLAGS = flags.FLAGS

_ALPHA = ['1', '0', '0', '0', '0', '0', '0', '0']


def _run(command: str):
  out = io.StringIO()
  code = cli.run_command(command, out)
  return code, out.getvalue()


class RunCommandTest(parameterized.TestCase):

  def setUp(self):
    super().setUp()
    if not FLAGS.is_parsed():
      FLAGS.mark_as_parsed()

  @flagsaver.flagsaver(coeffs=_ALPHA, force_outcome='phi+:phi+')
  def test_forced_alpha(self):
    code, text = _run('run')
    self.assertEqual(code, 0)
    (transcript,) = json.loads(text)
    self.assertAlmostEqual(transcript['fidelity_8q'], 1.0, delta=1e-10)
    self.assertEqual(transcript['outcome'], ['phi+', 'phi+'])
    self.assertEqual(transcript['correction'], ['I', 'I'])
    self.assertTrue(transcript['forced'])

  @flagsaver.flagsaver(random=True, seed=7, trials=1000)
  def test_thousand_random_trials(self):
    code, text = _run('run')
    self.assertEqual(code, 0)
    transcripts = json.loads(text)
    self.assertLen(transcripts, 1000)
    self.assertTrue(all(t['fidelity_8q'] >= 1 - 1e-10 for t in transcripts))
    self.assertTrue(all(t['classical_bits_sent'] == 4 for t in transcripts))

  @flagsaver.flagsaver(coeffs=['1', '0', '0', '0', '0', '0', '0', '1'])
  def test_unnormalized_coefficients(self):
    self.assertEqual(_run('run')[0], cli.ExitCode.INVALID_INPUT)

  @parameterized.named_parameters(
      ('neither_source', dict()),
      ('both_sources', dict(random=True, coeffs=_ALPHA)),
      ('wrong_count', dict(coeffs=['1', '0'])),
      ('not_a_number', dict(coeffs=['x'] * 8)),
      ('forced_batch', dict(random=True, trials=3, force_outcome='phi+:phi+')),
      ('bad_outcome', dict(random=True, force_outcome='phi+')),
      ('bad_variant', dict(random=True, variant='three-cnot')),
      ('bad_channel', dict(random=True, channel='phi+:chi')),
      ('coefficient_channel',
       dict(random=True, channel='coefficient-weighted-cluster')),
      ('cluster_channel', dict(random=True, channel='cluster')),
      ('zero_trials', dict(random=True, trials=0)),
  )
  def test_invalid_input(self, overrides):
    with flagsaver.flagsaver(**overrides):
      self.assertEqual(_run('run')[0], cli.ExitCode.INVALID_INPUT)

  @flagsaver.flagsaver(
      random=True, trials=3, force_outcome='psi-:phi-', replay_branch=True)
  def test_replay_branch(self):
    code, text = _run('run')
    self.assertEqual(code, 0)
    outcomes = {tuple(t['outcome']) for t in json.loads(text)}
    self.assertEqual(outcomes, {('psi-', 'phi-')})

  @flagsaver.flagsaver(coeffs=_ALPHA, variant='literal')
  def test_literal_variant_fails_generic_but_not_alpha(self):
    self.assertEqual(_run('run')[0], 0)
    with flagsaver.flagsaver(coeffs=None, random=True):
      self.assertEqual(_run('run')[0], cli.ExitCode.FAILURE)

  @flagsaver.flagsaver(random=True, variant='paper-literal')
  def test_paper_literal_alias(self):
    self.assertEqual(_run('run')[0], cli.ExitCode.FAILURE)

  @flagsaver.flagsaver(coeffs=_ALPHA, force_outcome='phi+:phi+')
  def test_probability_tolerance_from_config(self):
    tolerances = FLAGS.config.tolerances
    saved = tolerances.probability
    tolerances.probability = 0.3
    try:
      self.assertEqual(_run('run')[0], cli.ExitCode.IMPOSSIBLE_OUTCOME)
    finally:
      tolerances.probability = saved
    self.assertEqual(_run('run')[0], cli.ExitCode.OK)

  @flagsaver.flagsaver(coeffs=_ALPHA)
  def test_factorization_tolerance_from_config(self):
    tolerances = FLAGS.config.tolerances
    saved = tolerances.factorization
    # No Schmidt weight exceeds 1, so every state fails a negative tolerance.
    tolerances.factorization = -1.0
    try:
      self.assertEqual(_run('run')[0], cli.ExitCode.FAILURE)
    finally:
      tolerances.factorization = saved

  def test_impossible_outcome_exit_code(self):
    out = io.StringIO()
    error = bell.ZeroProbabilityOutcomeError('phi- has probability 0.')
    with mock.patch.object(protocol, 'run_trial', side_effect=error):
      code = cli.cmd_run(cli.RunConfig(coefficients=None), out)
    self.assertEqual(code, cli.ExitCode.IMPOSSIBLE_OUTCOME)
    self.assertEqual(out.getvalue(), '')

  @flagsaver.flagsaver(random=True, seed=7, trials=100, format='json')
  def test_deterministic_json(self):
    first = _run('run')
    second = _run('run')
    self.assertEqual(first, second)
    with flagsaver.flagsaver(num_workers=4):
      self.assertEqual(_run('run'), first)

  @flagsaver.flagsaver(random=True, seed=3, trials=10)
  def test_trial_offset_replays(self):
    batch = json.loads(_run('run')[1])
    with flagsaver.flagsaver(trials=1, trial_offset=6):
      (replayed,) = json.loads(_run('run')[1])
    self.assertEqual(replayed, batch[6])
    self.assertEqual(replayed['trial_index'], 6)
    self.assertEqual(replayed['seed'], 3)

  @flagsaver.flagsaver(random=True, channel='psi-:phi-', trials=20)
  def test_other_channel(self):
    code, text = _run('run')
    self.assertEqual(code, 0)
    self.assertEqual(json.loads(text)[0]['channel'], 'psi-:phi-')

  @flagsaver.flagsaver(random=True, trials=2, format='csv')
  def test_csv(self):
    code, text = _run('run')
    self.assertEqual(code, 0)
    lines = text.splitlines()
    self.assertLen(lines, 3)
    self.assertEqual(lines[0], ','.join(cli.TRANSCRIPT_FIELDS))

  def test_dump_state(self):
    path = self.create_tempfile().full_path
    with flagsaver.flagsaver(random=True, trials=2, dump_state=path):
      self.assertEqual(_run('run')[0], 0)
    with open(path) as f:
      states = json.load(f)
    self.assertLen(states, 2)
    self.assertEqual(states[0]['labels'], list(protocol.RECEIVER_LABELS))
    self.assertLen(states[0]['amplitudes'], 256)


class VerifyCommandTest(absltest.TestCase):

  def setUp(self):
    super().setUp()
    if not FLAGS.is_parsed():
      FLAGS.mark_as_parsed()

  @flagsaver.flagsaver(json=True)
  def test_default(self):
    code, text = _run('verify')
    self.assertEqual(code, 0)
    reports = json.loads(text)
    by_name = {r['name']: r for r in reports}
    self.assertEqual(by_name['compression-identity/two-cnot']['verdict'],
                     'holds')
    self.assertEqual(by_name['compression-identity/product-order']['verdict'],
                     'fails')
    self.assertEqual(by_name['compression-identity/written-order']['verdict'],
                     'holds-up-to-relabeling')
    self.assertTrue(by_name['branch-decomposition']['holds'])
    self.assertTrue(by_name['exhaustive-outcomes']['holds'])

  def test_corrupt_branch(self):
    out = io.StringIO()
    code = cli.cmd_verify(
        branch_batch=5,
        compression_random=2,
        oracle_batch=5,
        channel_batch=1,
        corrupt_branch=2,
        out=out)
    self.assertEqual(code, cli.ExitCode.FAILURE)

  @flagsaver.flagsaver(corrupt_branch=16)
  def test_corrupt_branch_out_of_range(self):
    self.assertEqual(_run('verify')[0], cli.ExitCode.INVALID_INPUT)

  def test_text_format(self):
    out = io.StringIO()
    code = cli.cmd_verify(
        branch_batch=2,
        compression_random=1,
        oracle_batch=2,
        channel_batch=1,
        output_format='text',
        out=out)
    self.assertEqual(code, 0)
    self.assertIn('1/4', out.getvalue())


class ResourcesCommandTest(absltest.TestCase):

  def setUp(self):
    super().setUp()
    if not FLAGS.is_parsed():
      FLAGS.mark_as_parsed()

  def test_default_text(self):
    code, text = _run('resources')
    self.assertEqual(code, 0)
    self.assertIn('cluster', text)
    self.assertIn('two-bell-pairs', text)
    self.assertIn('log2(ceil(n/2))', text)

  @flagsaver.flagsaver(n_range='1..8', format='csv')
  def test_csv_range(self):
    code, text = _run('resources')
    self.assertEqual(code, 0)
    bound_table = text.split('\n\n')[1].splitlines()
    self.assertEqual(bound_table[0], ','.join(cli.BELL_PAIR_FIELDS))
    column = [int(line.split(',')[1]) for line in bound_table[1:]]
    self.assertEqual(column, [0, 1, 2, 2, 3, 3, 3, 3])

  @flagsaver.flagsaver(json=True)
  def test_json(self):
    data = json.loads(_run('resources')[1])
    schemes = {s['scheme_name']: s for s in data['schemes']}
    self.assertEqual(schemes['cluster']['channel_qubits'], 6)
    self.assertEqual(schemes['two-bell-pairs']['bell_pairs'], 2)
    self.assertEqual(schemes['two-bell-pairs']['classical_bits'], 4)

  @flagsaver.flagsaver(n_range='8..1')
  def test_bad_range(self):
    self.assertEqual(_run('resources')[0], cli.ExitCode.INVALID_INPUT)

  def test_parse_n_range(self):
    self.assertEqual(cli.parse_n_range('2..5'), (2, 5))
    for text in ('1-8', '0..3', 'a..b'):
      with self.assertRaises(ValueError):
        cli.parse_n_range(text)


class MainTest(absltest.TestCase):

  def test_usage_error(self):
    with self.assertRaises(app.UsageError):
      cli.main(['cli'])
    with self.assertRaises(app.UsageError):
      cli.main(['cli', 'teleport'])


if __name__ == '__main__':
  absltest.main()
