# Copyright (c) 2026, bswitch contributors
#
# Permission to use, copy, modify, and/or distribute this software for any
# purpose with or without fee is hereby granted, provided that the above
# copyright notice and this permission notice appear in all copies.
#
# THE SOFTWARE IS PROVIDED "AS IS" AND THE AUTHOR DISCLAIMS ALL WARRANTIES
# WITH REGARD TO THIS SOFTWARE INCLUDING ALL IMPLIED WARRANTIES OF
# MERCHANTABILITY AND FITNESS. IN NO EVENT SHALL THE AUTHOR BE LIABLE FOR
# ANY SPECIAL, DIRECT, INDIRECT, OR CONSEQUENTIAL DAMAGES OR ANY DAMAGES
# WHATSOEVER RESULTING FROM LOSS OF USE, DATA OR PROFITS, WHETHER IN AN
# ACTION OF CONTRACT, NEGLIGENCE OR OTHER TORTIOUS ACTION, ARISING OUT OF
# OR IN CONNECTION WITH THE USE OR PERFORMANCE OF THIS SOFTWARE.

"""
Loading of system descriptions, presets and key=value files

A system file is YAML:

    name: my_system
    subsystems:
      - ["-1 1", "-1 -3"]          # rows as whitespace separated strings
      - [[0.01, 3], [-1, -4]]      # or nested lists
    rule:
      kind: state_sign             # state_sign | time_pulse | crisp_state_sign | crisp_time_pulse
      delta: 10
      m: 100
      active_when: positive        # sign of x1 * x2 that activates the first subsystem
    simulation:
      x0: [1, 1]
      dt: 0.001
      t_end: 10
"""

import logging
import os
import re
from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Tuple

import numpy as np
import oyaml
import yaml

from bswitch import settings
from bswitch.lib import bernstein
from bswitch.lib import switched
from bswitch.lib.exceptions import BSwitchException
from bswitch.lib.exceptions import ConfigParserError
from bswitch.lib.exceptions import PresetNotFoundException
from bswitch.lib.exceptions import ValidationException
from bswitch.lib.validators import Finite
from bswitch.lib.validators import PositiveFinite
from bswitch.lib.validators import PositiveInteger
from bswitch.lib.validators import UnitIntervalWindow

logger = logging.getLogger(__name__)

RULE_KINDS = ('state_sign', 'time_pulse', 'crisp_state_sign', 'crisp_time_pulse')


def parse_key_values(text: str) -> dict:
    """
    Parse key=value lines. Blank lines and lines starting with # are skipped, the split happens on the first =

    :param text: file contents
    :return: dict of stripped keys to stripped values
    """
    config = dict()
    for number, line in enumerate(text.split('\n'), start=1):
        if re.match(r'^\s*$', line) or re.match(r'^\s*#', line):
            continue

        if '=' not in line:
            raise ConfigParserError(f'Line {number} is not a key=value pair: {line}')

        (k, v) = map(str.strip, line.split('=', 1))
        config[k.replace('"', '')] = v.strip('"')

    return config


def parse_vector(text, name='x0') -> List[float]:
    """
    "1,1" or [1, 1] -> [1.0, 1.0]
    """
    if isinstance(text, str):
        pieces = [p for p in re.split(r'[,\s]+', text.strip()) if p]
    else:
        pieces = list(text)

    if not pieces:
        raise ValidationException(f'{name}: empty vector')

    return [Finite(name)(p) for p in pieces]


def parse_matrix(value, name='matrix') -> np.ndarray:
    """
    Accepts nested lists, a list of whitespace separated row strings, or "a b; c d"

    :param value: matrix description
    :param name: used in error messages
    :return: square float ndarray
    """
    if isinstance(value, str):
        value = [row for row in value.split(';') if row.strip()]

    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigParserError(f'{name}: expected a list of rows, got {value!r}')

    rows = list()
    for row in value:
        entries = row.split() if isinstance(row, str) else row
        if not isinstance(entries, (list, tuple)):
            raise ConfigParserError(f'{name}: row {row!r} is not a list of numbers')
        try:
            rows.append([Finite(name)(e) for e in entries])
        except ValidationException as ve:
            raise ConfigParserError(str(ve))

    if any(len(r) != len(rows) for r in rows):
        raise ConfigParserError(f'{name}: matrix must be square, got rows of lengths {[len(r) for r in rows]}')

    return np.array(rows, dtype=float)


def parse_bound(text: str) -> Tuple[str, float, float]:
    """
    "x1:0:1" -> ("x1", 0.0, 1.0)
    """
    pieces = text.split(':')
    if len(pieces) != 3 or not re.match(r'^[A-Za-z_][A-Za-z0-9_]*$', pieces[0].strip()):
        raise ValidationException(f'Bound "{text}" must look like var:lo:hi')

    name = pieces[0].strip()
    lo = Finite(f'{name} lower bound')(pieces[1])
    hi = Finite(f'{name} upper bound')(pieces[2])
    if lo > hi:
        raise ValidationException(f'Bound "{text}" has lower bound above upper bound')

    return name, lo, hi


def _windows(value) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigParserError(f'time pulse windows must be a list per subsystem, got {value!r}')

    per_subsystem = list()
    for i, windows in enumerate(value, start=1):
        try:
            per_subsystem.append(tuple(UnitIntervalWindow(f'subsystem {i} window')(w) for w in windows))
        except TypeError:
            raise ConfigParserError(f'subsystem {i}: windows must be a list of [start, end] pairs')
        except ValidationException as ve:
            raise ConfigParserError(str(ve))

    return tuple(per_subsystem)


def build_rule(rule: dict, degree: int = None, delta: float = None, depth: int = None) -> switched.SwitchingRule:
    """
    Build a switching rule from its YAML mapping; non-None keyword arguments override the file

    :param rule: mapping with a kind key
    :param degree: Bernstein degree override
    :param delta: state sign scale override
    :param depth: composition depth override, > 0 turns composition on
    :return: SwitchingRule
    """
    rule = dict(rule or {'kind': 'state_sign'})
    kind = rule.get('kind', 'state_sign')
    if kind not in RULE_KINDS:
        raise ConfigParserError(f'Unknown rule kind "{kind}", expected one of {", ".join(RULE_KINDS)}')

    degree = degree if degree is not None else rule.get('m', settings.DEFAULT_DEGREE)
    m = PositiveInteger('m', maximum=settings.MAX_SERIES_DEGREE)(degree)
    scale = PositiveFinite('delta')(delta if delta is not None else rule.get('delta', settings.DEFAULT_DELTA))
    active_when = str(rule.get('active_when', 'positive'))
    if active_when not in bernstein.ACTIVE_WHEN:
        raise ConfigParserError(f'active_when must be one of {", ".join(bernstein.ACTIVE_WHEN)}, '
                                f'got "{active_when}"')

    try:
        if kind == 'state_sign':
            if depth is not None:
                stages = PositiveInteger('depth', minimum=0)(depth)
                return switched.StateSign(scale, m, composed=stages > 0, depth=max(stages, 1),
                                          active_when=active_when)

            stages = PositiveInteger('depth')(rule.get('depth', 1))
            return switched.StateSign(scale, m, composed=bool(rule.get('composed', False)), depth=stages,
                                      active_when=active_when)

        if kind == 'crisp_state_sign':
            return switched.CrispStateSign(scale, active_when)

        windows = _windows(rule.get('windows'))
        if kind == 'time_pulse':
            return switched.TimePulse(windows, m)

        return switched.CrispTimePulse(windows)

    except ValidationException:
        raise
    except BSwitchException as be:
        raise ConfigParserError(f'Invalid {kind} rule: {be}')


@dataclass
class SystemConfig:
    name: str
    matrices: List[np.ndarray]
    rule: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    description: str = ''

    def switched_system(self, degree: int = None, delta: float = None, depth: int = None) -> switched.SwitchedSystem:
        """
        Build the SwitchedSystem. A single matrix is paired with itself so that both simulation modes
        follow the same linear dynamics.
        """
        matrices = list(self.matrices)
        if len(matrices) == 1:
            logger.debug(f'{self.name} has one subsystem, pairing it with itself')
            matrices = matrices * 2

        rule = build_rule(self.rule, degree=degree, delta=delta, depth=depth)
        try:
            return switched.SwitchedSystem(tuple(switched.LinearSubsystem(a) for a in matrices), rule, self.name)
        except BSwitchException as be:
            raise ConfigParserError(f'{self.name}: {be}')


def system_from_dict(name: str, data: dict) -> SystemConfig:
    if not isinstance(data, dict):
        raise ConfigParserError(f'{name}: system description must be a mapping')

    subsystems = data.get('subsystems')
    if not subsystems or not isinstance(subsystems, list):
        raise ConfigParserError(f'{name}: subsystems must be a non-empty list of matrices')

    matrices = [parse_matrix(m, f'{name} subsystem {i}') for i, m in enumerate(subsystems, start=1)]
    if len({m.shape for m in matrices}) != 1:
        raise ConfigParserError(f'{name}: subsystems have mixed dimensions')

    rule = data.get('rule') or dict()
    simulation = data.get('simulation') or dict()
    if not isinstance(rule, dict) or not isinstance(simulation, dict):
        raise ConfigParserError(f'{name}: rule and simulation must be mappings')

    return SystemConfig(name=str(data.get('name', name)), matrices=matrices, rule=dict(rule),
                        simulation=dict(simulation), description=str(data.get('description', '')))


def load_system_config(path: str) -> SystemConfig:
    """
    Load a YAML system file

    :param path: path to the file
    :return: SystemConfig
    """
    if not os.path.isfile(path):
        raise ConfigParserError(f'Config file {path} does not exist')

    try:
        with open(path, 'r') as config_file:
            data = yaml.safe_load(config_file.read())
    except yaml.YAMLError as ye:
        raise ConfigParserError(f'Could not parse {path}: {ye}')
    except OSError as oe:
        raise ConfigParserError(f'Could not read {path}: {oe}')

    return system_from_dict(os.path.splitext(os.path.basename(path))[0], data)


def load_presets(path: str = settings.PRESETS_FILE) -> dict:
    """
    Presets in file order
    """
    try:
        with open(path, 'r') as presets_file:
            data = oyaml.safe_load(presets_file.read())
    except (OSError, yaml.YAMLError) as e:
        raise ConfigParserError(f'Could not load presets from {path}: {e}')

    if not isinstance(data, dict):
        raise ConfigParserError(f'Presets file {path} must be a mapping of names to systems')

    return data


def list_presets() -> List[SystemConfig]:
    return [system_from_dict(name, data) for name, data in load_presets().items()]


def get_preset(name: str) -> SystemConfig:
    presets = load_presets()
    if name not in presets:
        raise PresetNotFoundException(f'Unknown preset "{name}", available presets: {", ".join(presets)}')

    return system_from_dict(name, presets[name])
