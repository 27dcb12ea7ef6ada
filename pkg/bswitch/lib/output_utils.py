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

import csv
from typing import Iterable
from typing import List
from typing import TextIO
from typing import Tuple

from jinja2 import BaseLoader
from jinja2 import Environment

environment = Environment(loader=BaseLoader(), keep_trailing_newline=True)

KEY_VALUE_TEMPLATE = '''{% for key, value in fields %}{{ key }}={{ value }}
{% endfor %}'''

PRESET_TEMPLATE = '''{{ name }}{% if description %}: {{ description }}{% endif %}
{% for matrix in matrices %}  A{{ loop.index }} = {{ matrix }}
{% endfor %}'''

POLYNOMIAL_TEMPLATE = '''# variables: {{ variables | join(',') }}
{{ text }}
'''


def number(value) -> str:
    # shortest round trip form, also for numpy scalars
    return repr(float(value))


def trajectory_header(n: int, k: int) -> List[str]:
    return ['t'] + [f'x{i}' for i in range(1, n + 1)] + [f'sigma{i}' for i in range(1, k + 1)] + ['mode']


def trajectory_rows(trajectory) -> Iterable[List[str]]:
    """
    One row per recorded step: t, the state, one weight per subsystem and the mode
    """
    for t, x, w in zip(trajectory.times, trajectory.states, trajectory.weights):
        yield [number(t)] + [number(v) for v in x] + [number(v) for v in w] + [trajectory.mode.value]


def write_trajectories(stream: TextIO, trajectories) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    first = trajectories[0]
    writer.writerow(trajectory_header(first.states.shape[1], first.weights.shape[1]))
    for trajectory in trajectories:
        writer.writerows(trajectory_rows(trajectory))


def write_signal(stream: TextIO, xs, values) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['x', 'sigma'])
    for x, v in zip(xs, values):
        writer.writerow([number(x), number(v)])


def render_key_values(fields: List[Tuple[str, str]]) -> str:
    return environment.from_string(KEY_VALUE_TEMPLATE).render(fields=fields)


def render_preset(name: str, description: str, matrices) -> str:
    rendered = ['[' + '; '.join(' '.join(number(v) for v in row) for row in m) + ']' for m in matrices]
    return environment.from_string(PRESET_TEMPLATE).render(name=name, description=description, matrices=rendered)


def render_polynomial(variables, text: str) -> str:
    return environment.from_string(POLYNOMIAL_TEMPLATE).render(variables=variables, text=text)
