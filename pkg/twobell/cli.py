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

"""Command-line entry point.

  python -m twobell.cli run --random --seed 7 --trials 1000
  python -m twobell.cli run --coeffs 1,0,0,0,0,0,0,0 --force_outcome phi+:phi+
  python -m twobell.cli verify --json
  python -m twobell.cli resources --n_range 1..8 --format csv

Explicit flags override the values of `--config` (see
configs/teleport_config.py), e.g. `--config.verify.branch_batch=10`.
"""

import dataclasses
import enum
import functools
import sys
from concurrent import futures
from typing import Optional, Sequence, TextIO, Tuple

from absl import app
from absl import flags
from absl import logging
from ml_collections import config_flags

from twobell import bell
from twobell import protocol
from twobell import resources
from twobell import statevector as sv
from twobell import verify
from twobell.configs import teleport_config
from twobell.utils import report_utils

FLAGS = flags.FLAGS

COMMANDS = ('run', 'verify', 'resources')

config_flags.DEFINE_config_dict('config', teleport_config.get_config())

flags.DEFINE_integer('seed', None, 'Base seed; trial k uses seed + k.')
flags.DEFINE_enum('format', None, report_utils.FORMATS, 'Output format.')
flags.DEFINE_string('variant', None,
                    'Compression variant: two-cnot|paper-literal.')
flags.DEFINE_string('channel', None, 'Bell-pair channel, e.g. phi+:phi+.')
flags.DEFINE_list(
    'coeffs', None,
    'alpha, beta, gamma, delta as 8 reals in (re, im) order.')
flags.DEFINE_boolean('random', False, 'Draw Haar-random coefficients.')
flags.DEFINE_integer('trials', None, 'Number of trials for `run`.')
flags.DEFINE_integer('trial_offset', 0,
                     'Index of the first trial; replays trial k of a batch.')
flags.DEFINE_integer('num_workers', None, 'Threads used by `run`.')
flags.DEFINE_string('force_outcome', None,
                    'Force both Bell outcomes, e.g. phi-:psi+.')
flags.DEFINE_boolean('replay_branch', False,
                     'Allow --force_outcome with more than one trial.')
flags.DEFINE_string('dump_state', None,
                    'Write the reconstructed states to this JSON file.')
flags.DEFINE_integer('corrupt_branch', None,
                     'Swap the corrections of branch k and 15 - k (verify).')
flags.DEFINE_boolean('json', False, 'Shorthand for --format json.')
flags.DEFINE_string('n_range', None, 'Range of n for resources, e.g. 1..8.')


class ExitCode(enum.IntEnum):
  OK = 0
  FAILURE = 1
  INVALID_INPUT = 2
  IMPOSSIBLE_OUTCOME = 3


TRANSCRIPT_FIELDS = (
    'trial_index',
    'seed',
    'outcome',
    'correction',
    'probability',
    'fidelity_2q',
    'fidelity_8q',
    'classical_bits_sent',
    'bell_pairs',
    'forced',
    'variant',
    'channel',
    'coefficients',
)
REPORT_FIELDS = ('name', 'verdict', 'expected', 'max_deviation')
SCHEME_FIELDS = (
    'scheme_name',
    'channel_qubits',
    'bell_pairs',
    'product_channel',
    'classical_bits',
    'sender_gate_counts',
    'receiver_gate_counts',
    'max_correction_gates',
    'min_bell_pairs_required',
    'at_lower_bound',
)
BELL_PAIR_FIELDS = ('n', 'min_bell_pairs', 'printed_formula')


@dataclasses.dataclass(frozen=True)
class RunConfig:
  """Validated settings of one `run` invocation.

  Attributes:
    coefficients: fixed coefficients, or None to draw them per trial.
    seed: base seed.
    trials: number of trials, at least 1.
    trial_offset: index of the first trial.
    forced_outcome: optional outcome forced in every trial.
    replay_branch: allows a forced outcome with trials > 1.
    variant: compression variant.
    channel: Bell-pair channel.
    output_format: one of report_utils.FORMATS.
    dump_state: optional JSON path for the reconstructed states.
    num_workers: worker threads.
    fidelity_tolerance: pass threshold on 1 - fidelity_8q.
    factor_tolerance: factorization tolerance used by compression.
    zero_probability: forced outcomes at or below this probability are
      impossible.
  """

  coefficients: Optional[protocol.CoefficientSet]
  seed: int = 0
  trials: int = 1
  trial_offset: int = 0
  forced_outcome: Optional[bell.BellOutcome] = None
  replay_branch: bool = False
  variant: protocol.CompressionVariant = protocol.CompressionVariant.TWO_CNOT
  channel: protocol.ChannelSpec = protocol.ChannelSpec()
  output_format: str = 'json'
  dump_state: Optional[str] = None
  num_workers: int = 1
  fidelity_tolerance: float = protocol.FIDELITY_TOLERANCE
  factor_tolerance: float = sv.FACTOR_TOLERANCE
  zero_probability: float = bell.ZERO_PROBABILITY

  def __post_init__(self):
    if self.trials < 1:
      raise ValueError(f'trials must be >= 1, got {self.trials}.')
    if self.trial_offset < 0:
      raise ValueError(f'trial_offset must be >= 0, got {self.trial_offset}.')
    if self.num_workers < 1:
      raise ValueError(f'num_workers must be >= 1, got {self.num_workers}.')
    if (self.forced_outcome is not None and self.trials > 1 and
        not self.replay_branch):
      raise ValueError(
          'A forced outcome with more than one trial repeats one branch; pass '
          '--replay_branch to do so explicitly.')
    if self.output_format not in report_utils.FORMATS:
      raise ValueError(f'Unknown output format {self.output_format!r}.')
    protocol.build_channel(self.channel)
    if self.channel.kind != protocol.ChannelKind.BELL_PAIRS:
      raise ValueError(f'Channel {self.channel.token} is not a Bell-pair '
                       'product.')

  def trial_indices(self) -> range:
    return range(self.trial_offset, self.trial_offset + self.trials)


def _trial(config: RunConfig, trial_index: int) -> protocol.TeleportTranscript:
  return protocol.run_trial(
      config.seed,
      trial_index,
      coefficients=config.coefficients,
      forced=config.forced_outcome,
      variant=config.variant,
      channel=config.channel,
      factor_tolerance=config.factor_tolerance,
      zero_probability=config.zero_probability,
  )


def cmd_run(config: RunConfig, out: TextIO = sys.stdout) -> int:
  """Runs the trials and writes one transcript per trial to `out`.

  Args:
    config: validated run settings.
    out: stream for the report.

  Returns:
    ExitCode.OK iff every fidelity_8q >= 1 - tolerance.
  """
  run = functools.partial(_trial, config)
  try:
    if config.num_workers > 1:
      with futures.ThreadPoolExecutor(config.num_workers) as pool:
        transcripts = list(pool.map(run, config.trial_indices()))
    else:
      transcripts = [run(k) for k in config.trial_indices()]
  except bell.ZeroProbabilityOutcomeError as e:
    logging.error('Impossible forced outcome: %s', e)
    return ExitCode.IMPOSSIBLE_OUTCOME
  except protocol.FactorizationError as e:
    logging.error('Compression failed: %s', e)
    return ExitCode.FAILURE

  out.write(
      report_utils.render([t.to_dict() for t in transcripts],
                          TRANSCRIPT_FIELDS, config.output_format))
  if config.dump_state:
    logging.info('Writing file "%s".', config.dump_state)
    with open(config.dump_state, 'w') as f:
      f.write(report_utils.to_json([t.final_state.to_dict()
                                    for t in transcripts]))

  failed = [
      t.trial_index
      for t in transcripts
      if t.fidelity_8q < 1.0 - config.fidelity_tolerance
  ]
  logging.info('Ran %d trials; %d below fidelity threshold.', len(transcripts),
               len(failed))
  if failed:
    logging.error('Fidelity below threshold in trials %s.', failed)
    return ExitCode.FAILURE
  return ExitCode.OK


def cmd_verify(
    seed: int = 0,
    branch_batch: int = 100,
    compression_random: int = 20,
    oracle_batch: int = 100,
    channel_batch: int = 5,
    corrupt_branch: Optional[int] = None,
    output_format: str = 'json',
    out: TextIO = sys.stdout,
) -> int:
  """Runs every identity check; ExitCode.OK iff each matches its verdict."""
  reports = verify.run_all(
      seed=seed,
      branch_batch=branch_batch,
      compression_random=compression_random,
      oracle_batch=oracle_batch,
      channel_batch=channel_batch,
      corrupt_branch=corrupt_branch,
  )
  rows = [r.to_dict() for r in reports]
  if output_format == 'text':
    out.write(verify.BRANCH_WEIGHT_NOTE + '\n\n')
  out.write(report_utils.render(rows, REPORT_FIELDS, output_format))
  if not verify.all_expected(reports):
    unexpected = [r.name for r in reports if not r.as_expected]
    logging.error('Unexpected verdicts: %s', unexpected)
    return ExitCode.FAILURE
  return ExitCode.OK


def cmd_resources(
    variant: protocol.CompressionVariant = protocol.CompressionVariant.TWO_CNOT,
    n_min: int = 1,
    n_max: int = 8,
    output_format: str = 'text',
    out: TextIO = sys.stdout,
) -> int:
  """Prints the cluster vs two-Bell-pair comparison and the bound table."""
  schemes = [
      resources.audit(resources.Scheme.CLUSTER, variant).to_dict(),
      resources.audit(resources.Scheme.TWO_BELL_PAIRS, variant).to_dict(),
  ]
  rows = resources.min_bell_pairs_rows(n_min, n_max)
  if output_format == 'json':
    out.write(
        report_utils.to_json({
            'schemes': schemes,
            'min_bell_pairs': rows,
            'note': resources.FORMULA_NOTE,
        }))
    return ExitCode.OK
  out.write(report_utils.render(schemes, SCHEME_FIELDS, output_format))
  out.write('\n')
  out.write(report_utils.render(rows, BELL_PAIR_FIELDS, output_format))
  if output_format == 'text':
    out.write('\n' + resources.FORMULA_NOTE + '\n')
  return ExitCode.OK


def parse_n_range(text: str) -> Tuple[int, int]:
  """Parses 'lo..hi'."""
  parts = text.split('..')
  if len(parts) != 2:
    raise ValueError(f'Expected an n range like 1..8, got {text!r}.')
  try:
    lo, hi = int(parts[0]), int(parts[1])
  except ValueError:
    raise ValueError(f'Expected integers in n range, got {text!r}.') from None
  if lo < 1 or hi < lo:
    raise ValueError(f'Invalid n range {text!r}.')
  return lo, hi


def _parse_coeffs(values: Sequence[str],
                  tolerance: float) -> protocol.CoefficientSet:
  try:
    reals = [float(v) for v in values]
  except ValueError:
    raise protocol.CoefficientError(
        f'--coeffs takes 8 reals, got {list(values)}.') from None
  return protocol.CoefficientSet.from_reals(reals, tolerance)


def _pick(flag_value, config_value):
  return config_value if flag_value is None else flag_value


def _output_format() -> str:
  if FLAGS.json:
    return 'json'
  return _pick(FLAGS.format, FLAGS.config.output_format)


def _variant() -> protocol.CompressionVariant:
  return protocol.CompressionVariant.from_token(
      _pick(FLAGS.variant, FLAGS.config.variant))


def run_config_from_flags() -> RunConfig:
  """Builds a RunConfig from flags over --config defaults.

  Raises:
    ValueError: for any invalid flag combination or value.
  """
  config = FLAGS.config
  if FLAGS.random == (FLAGS.coeffs is not None):
    raise ValueError('Pass exactly one of --coeffs and --random.')
  coefficients = None
  if FLAGS.coeffs is not None:
    coefficients = _parse_coeffs(FLAGS.coeffs, config.tolerances.autonormalize)
  forced = None
  if FLAGS.force_outcome:
    forced = bell.BellOutcome.from_token(FLAGS.force_outcome)
  return RunConfig(
      coefficients=coefficients,
      seed=_pick(FLAGS.seed, config.seed),
      trials=_pick(FLAGS.trials, config.trials),
      trial_offset=FLAGS.trial_offset,
      forced_outcome=forced,
      replay_branch=FLAGS.replay_branch,
      variant=_variant(),
      channel=protocol.ChannelSpec.from_token(
          _pick(FLAGS.channel, config.channel)),
      output_format=_output_format(),
      dump_state=FLAGS.dump_state,
      num_workers=_pick(FLAGS.num_workers, config.num_workers),
      fidelity_tolerance=config.tolerances.fidelity,
      factor_tolerance=config.tolerances.factorization,
      zero_probability=config.tolerances.probability,
  )


def run_command(command: str, out: TextIO = sys.stdout) -> int:
  """Dispatches one command using the parsed flags."""
  config = FLAGS.config
  try:
    if command == 'run':
      run_config = run_config_from_flags()
    elif command == 'verify':
      kwargs = dict(
          seed=_pick(FLAGS.seed, config.verify.seed),
          branch_batch=config.verify.branch_batch,
          compression_random=config.verify.compression_random,
          oracle_batch=config.verify.oracle_batch,
          channel_batch=config.verify.channel_batch,
          corrupt_branch=FLAGS.corrupt_branch,
          output_format=_output_format(),
      )
      if FLAGS.corrupt_branch is not None and not 0 <= FLAGS.corrupt_branch < 16:
        raise ValueError(
            f'--corrupt_branch must be in [0, 16), got {FLAGS.corrupt_branch}.')
    elif command == 'resources':
      n_min, n_max = config.resources.n_min, config.resources.n_max
      if FLAGS.n_range:
        n_min, n_max = parse_n_range(FLAGS.n_range)
      variant = _variant()
      output_format = _pick(FLAGS.format, 'text')
      if FLAGS.json:
        output_format = 'json'
    else:
      raise ValueError(f'Unknown command {command!r}; expected one of '
                       f'{COMMANDS}.')
  except ValueError as e:
    logging.error('Invalid input: %s', e)
    return ExitCode.INVALID_INPUT

  if command == 'run':
    return cmd_run(run_config, out)
  if command == 'verify':
    return cmd_verify(out=out, **kwargs)
  return cmd_resources(variant, n_min, n_max, output_format, out)


def main(argv: Sequence[str]) -> None:
  if len(argv) != 2 or argv[1] not in COMMANDS:
    raise app.UsageError(
        f'Expected exactly one command of {COMMANDS}, got {list(argv[1:])}.',
        exitcode=ExitCode.INVALID_INPUT)
  sys.exit(int(run_command(argv[1])))


if __name__ == '__main__':
  app.run(main)
