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

"""Rendering of report rows as JSON, CSV or aligned text."""

import csv
import io
import json
from typing import Any, Mapping, Sequence

FORMATS = ('json', 'csv', 'text')


def _cell(value: Any) -> str:
  if value is None:
    return '-'
  if isinstance(value, float):
    return f'{value:.12g}'
  if isinstance(value, (list, tuple)):
    return ':'.join(_cell(v) for v in value)
  if isinstance(value, Mapping):
    return ','.join(f'{k}={_cell(v)}' for k, v in value.items())
  return str(value)


def to_json(payload: Any) -> str:
  """Deterministic JSON: insertion-ordered keys, repr-exact floats."""
  return json.dumps(payload, indent=2) + '\n'


def to_csv(rows: Sequence[Mapping[str, Any]], fields: Sequence[str]) -> str:
  """CSV with a fixed header row given by `fields`."""
  buffer = io.StringIO()
  writer = csv.writer(buffer, lineterminator='\n')
  writer.writerow(fields)
  for row in rows:
    writer.writerow([_cell(row.get(f)) for f in fields])
  return buffer.getvalue()


def text_table(rows: Sequence[Mapping[str, Any]], fields: Sequence[str]) -> str:
  """Plain-text table with left-aligned, space-padded columns."""
  cells = [list(fields)] + [[_cell(row.get(f)) for f in fields] for row in rows]
  widths = [max(len(r[i]) for r in cells) for i in range(len(fields))]
  lines = []
  for i, row in enumerate(cells):
    lines.append('  '.join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    if i == 0:
      lines.append('  '.join('-' * w for w in widths))
  return '\n'.join(lines) + '\n'


def render(
    rows: Sequence[Mapping[str, Any]],
    fields: Sequence[str],
    output_format: str,
) -> str:
  if output_format == 'json':
    return to_json([dict(r) for r in rows])
  if output_format == 'csv':
    return to_csv(rows, fields)
  if output_format == 'text':
    return text_table(rows, fields)
  raise ValueError(
      f'Unknown output format {output_format!r}; expected one of {FORMATS}.')
