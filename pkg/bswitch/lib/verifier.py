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
Numerical certification of polynomial inequalities on boxes

verify_ineq decides "for all x in the box, p(x) < epsilon" by branch and bound. Each box is bounded with
the natural interval extension and a second order Taylor bound, both inflated outward by a relative slack
on every operation. There is no directed rounding; results are numerical certificates, not proofs.
"""

import logging
import math
import time
from collections import deque
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from enum import Enum
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from bswitch import settings
from bswitch.lib import config_utils
from bswitch.lib import output_utils
from bswitch.lib.exceptions import ConfigParserError
from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import UnknownVariableException
from bswitch.lib.exceptions import VerifierConfigException
from bswitch.lib.poly import MultiPoly
from bswitch.lib.poly import sort_variables

logger = logging.getLogger(__name__)

# smallest positive subnormal, keeps zero-width results from collapsing
_TINY = 5e-324


def _inflate(lo: float, hi: float, slack: float) -> Tuple[float, float]:
    margin = slack * max(abs(lo), abs(hi)) + _TINY
    return lo - margin, hi + margin


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            return

        if self.lo > self.hi:
            raise DimensionMismatchException(f'Empty interval [{self.lo}, {self.hi}]')

    @classmethod
    def point(cls, value: float) -> 'Interval':
        return cls(float(value), float(value))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def magnitude(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def add(self, other: 'Interval', slack: float = settings.DEFAULT_SLACK_FACTOR) -> 'Interval':
        return Interval(*_inflate(self.lo + other.lo, self.hi + other.hi, slack))

    def scale(self, factor: float, slack: float = settings.DEFAULT_SLACK_FACTOR) -> 'Interval':
        a, b = self.lo * factor, self.hi * factor
        return Interval(*_inflate(min(a, b), max(a, b), slack))

    def mul(self, other: 'Interval', slack: float = settings.DEFAULT_SLACK_FACTOR) -> 'Interval':
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(*_inflate(min(products), max(products), slack))

    def power(self, k: int, slack: float = settings.DEFAULT_SLACK_FACTOR) -> 'Interval':
        if k == 0:
            return Interval(1.0, 1.0)

        a, b = self.lo ** k, self.hi ** k
        if k % 2:
            return Interval(*_inflate(a, b, slack))

        if self.lo <= 0.0 <= self.hi:
            return Interval(*_inflate(0.0, max(a, b), slack))

        return Interval(*_inflate(min(a, b), max(a, b), slack))

    def __add__(self, other):
        return self.add(other if isinstance(other, Interval) else Interval.point(other))

    def __mul__(self, other):
        if isinstance(other, Interval):
            return self.mul(other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def __str__(self):
        return f'[{self.lo!r}, {self.hi!r}]'


@dataclass(frozen=True)
class Box:
    names: Tuple[str, ...]
    intervals: Tuple[Interval, ...]

    def __post_init__(self):
        names = tuple(self.names)
        intervals = tuple(i if isinstance(i, Interval) else Interval(float(i[0]), float(i[1])) for i in self.intervals)
        if len(names) != len(intervals):
            raise DimensionMismatchException(f'Box has {len(names)} names and {len(intervals)} intervals')

        if len(set(names)) != len(names):
            raise DimensionMismatchException(f'Duplicate box dimensions in {names}')

        for name, interval in zip(names, intervals):
            if not interval.is_finite():
                raise DimensionMismatchException(f'Bounds of {name} must be finite, got {interval}')

        ordered = sort_variables(names)
        lookup = dict(zip(names, intervals))
        object.__setattr__(self, 'names', ordered)
        object.__setattr__(self, 'intervals', tuple(lookup[n] for n in ordered))

    @classmethod
    def from_bounds(cls, bounds: Dict[str, Tuple[float, float]]) -> 'Box':
        return cls(tuple(bounds), tuple(Interval(float(lo), float(hi)) for lo, hi in bounds.values()))

    @classmethod
    def from_text(cls, text: str) -> 'Box':
        """
        Parse "x1:0.0:1.0,x2:0.0:1.0"
        """
        bounds = dict()
        for piece in filter(None, (p.strip() for p in text.split(','))):
            name, lo, hi = config_utils.parse_bound(piece)
            bounds[name] = (lo, hi)

        return cls.from_bounds(bounds)

    def to_text(self) -> str:
        return ','.join(f'{n}:{i.lo!r}:{i.hi!r}' for n, i in zip(self.names, self.intervals))

    def __len__(self):
        return len(self.names)

    def __getitem__(self, name: str) -> Interval:
        return self.intervals[self.names.index(name)]

    @property
    def midpoint(self) -> Tuple[float, ...]:
        return tuple(i.midpoint for i in self.intervals)

    def half_widths(self, center: Sequence[float] = None) -> Tuple[float, ...]:
        """
        w_i = max(y_i - lo_i, hi_i - y_i) around the center y, which covers rounding of the midpoint
        """
        center = center if center is not None else self.midpoint
        return tuple(max(y - i.lo, i.hi - y) for y, i in zip(center, self.intervals))

    def widest_dimension(self) -> int:
        widths = [i.width for i in self.intervals]
        # index() returns the lowest index on ties
        return widths.index(max(widths))

    def bisect(self, dimension: int) -> Tuple['Box', 'Box']:
        interval = self.intervals[dimension]
        middle = interval.midpoint
        left = self.intervals[:dimension] + (Interval(interval.lo, middle),) + self.intervals[dimension + 1:]
        right = self.intervals[:dimension] + (Interval(middle, interval.hi),) + self.intervals[dimension + 1:]
        return Box(self.names, left), Box(self.names, right)

    def face(self, dimension: int, upper: bool) -> 'Box':
        interval = self.intervals[dimension]
        value = interval.hi if upper else interval.lo
        intervals = self.intervals[:dimension] + (Interval.point(value),) + self.intervals[dimension + 1:]
        return Box(self.names, intervals)

    def degenerate(self, point: Sequence[float]) -> 'Box':
        return Box(self.names, tuple(Interval.point(v) for v in point))

    def contains(self, point: Sequence[float]) -> bool:
        return all(i.contains(v) for i, v in zip(self.intervals, point))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lows = np.array([i.lo for i in self.intervals])
        highs = np.array([i.hi for i in self.intervals])
        return lows + rng.random((count, len(self))) * (highs - lows)


class CertificateStatus(Enum):
    VERIFIED = 'Verified'
    FALSIFIED = 'Falsified'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class VerifyConfig:
    epsilon: float = settings.DEFAULT_EPSILON
    max_depth: int = settings.DEFAULT_MAX_DEPTH
    max_boxes: int = settings.DEFAULT_MAX_BOXES
    slack_factor: float = settings.DEFAULT_SLACK_FACTOR
    use_monotonicity: bool = True
    random_samples: int = settings.DEFAULT_RANDOM_SAMPLES
    seed: int = settings.DEFAULT_RANDOM_SEED

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise VerifierConfigException(f'epsilon must be finite, got {self.epsilon}')

        for name in ('max_depth', 'max_boxes'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise VerifierConfigException(f'{name} must be a positive integer, got {value}')

        if not (self.slack_factor > 0 and math.isfinite(self.slack_factor)):
            raise VerifierConfigException(f'slack_factor must be positive and finite, got {self.slack_factor}')

        if not isinstance(self.random_samples, int) or self.random_samples < 0:
            raise VerifierConfigException(f'random_samples must be a non-negative integer, got {self.random_samples}')

        if not isinstance(self.seed, int) or self.seed < 0:
            raise VerifierConfigException(f'seed must be a non-negative integer, got {self.seed}')

    @property
    def threshold(self) -> float:
        """
        Bounds must fall below this value for a box to pass
        """
        return self.epsilon - self.slack_factor * max(1.0, abs(self.epsilon))


@dataclass
class Certificate:
    status: CertificateStatus
    polynomial: str
    box: Box
    config: VerifyConfig
    witness: Optional[Tuple[float, ...]] = None
    value: Optional[float] = None
    reason: Optional[str] = None
    boxes_processed: int = 0
    max_depth_reached: int = 0
    pass_interval: int = 0
    pass_taylor: int = 0
    pass_mono: int = 0
    unresolved_boxes: int = 0
    elapsed: Optional[float] = field(default=None, compare=False)

    @property
    def verified(self) -> bool:
        return self.status is CertificateStatus.VERIFIED

    @property
    def falsified(self) -> bool:
        return self.status is CertificateStatus.FALSIFIED

    def fields(self) -> List[Tuple[str, str]]:
        """
        Ordered key / value pairs of the certificate file. elapsed is not part of it.
        """
        def optional(value):
            return 'none' if value is None else repr(value)

        witness = 'none' if self.witness is None else ','.join(repr(float(v)) for v in self.witness)
        return [
            ('status', self.status.value),
            ('polynomial', self.polynomial),
            ('variables', ','.join(self.box.names)),
            ('box', self.box.to_text()),
            ('epsilon', repr(self.config.epsilon)),
            ('max_depth', str(self.config.max_depth)),
            ('max_boxes', str(self.config.max_boxes)),
            ('slack_factor', repr(self.config.slack_factor)),
            ('use_monotonicity', str(self.config.use_monotonicity).lower()),
            ('random_samples', str(self.config.random_samples)),
            ('seed', str(self.config.seed)),
            ('witness', witness),
            ('value', optional(self.value)),
            ('reason', self.reason or 'none'),
            ('boxes_processed', str(self.boxes_processed)),
            ('max_depth_reached', str(self.max_depth_reached)),
            ('pass_interval', str(self.pass_interval)),
            ('pass_taylor', str(self.pass_taylor)),
            ('pass_mono', str(self.pass_mono)),
            ('unresolved_boxes', str(self.unresolved_boxes)),
            ('rigor', settings.RIGOR_DISCLAIMER),
        ]

    def to_text(self) -> str:
        return output_utils.render_key_values(self.fields())

    @classmethod
    def from_text(cls, text: str) -> 'Certificate':
        """
        Read a certificate written by to_text

        :param text: certificate file contents
        :return: Certificate, elapsed is None
        """
        values = config_utils.parse_key_values(text)
        try:
            config = VerifyConfig(epsilon=float(values['epsilon']),
                                  max_depth=int(values['max_depth']),
                                  max_boxes=int(values['max_boxes']),
                                  slack_factor=float(values['slack_factor']),
                                  use_monotonicity=values['use_monotonicity'] == 'true',
                                  random_samples=int(values['random_samples']),
                                  seed=int(values['seed']))

            witness = None
            if values['witness'] != 'none':
                witness = tuple(float(v) for v in values['witness'].split(','))

            return cls(status=CertificateStatus(values['status']),
                       polynomial=values['polynomial'],
                       box=Box.from_text(values['box']),
                       config=config,
                       witness=witness,
                       value=None if values['value'] == 'none' else float(values['value']),
                       reason=None if values['reason'] == 'none' else values['reason'],
                       boxes_processed=int(values['boxes_processed']),
                       max_depth_reached=int(values['max_depth_reached']),
                       pass_interval=int(values['pass_interval']),
                       pass_taylor=int(values['pass_taylor']),
                       pass_mono=int(values['pass_mono']),
                       unresolved_boxes=int(values['unresolved_boxes']))
        except KeyError as ke:
            raise ConfigParserError(f'Certificate is missing field {ke}')
        except ValueError as ve:
            raise ConfigParserError(f'Malformed certificate: {ve}')


def _embed(p: MultiPoly, b: Box) -> MultiPoly:
    try:
        return p.with_variables(b.names)
    except UnknownVariableException as uve:
        raise DimensionMismatchException(f'Polynomial variables {p.variables} are not covered by the box '
                                         f'{b.names}: {uve}')


def _interval_eval(p: MultiPoly, b: Box, slack: float) -> Interval:
    total = Interval(0.0, 0.0)
    for exponents, coefficient in p.sorted_terms():
        term = Interval.point(coefficient)
        for interval, e in zip(b.intervals, exponents):
            if e:
                term = term.mul(interval.power(e, slack), slack)
        total = total.add(term, slack)

    return total


def interval_eval(p: MultiPoly, b: Box, slack: float = settings.DEFAULT_SLACK_FACTOR) -> Interval:
    """
    Natural interval extension of p over b, every operation inflated outward by slack

    :param p: polynomial whose variables are a subset of the box dimensions
    :param b: Box
    :param slack: relative outward slack
    :return: Interval containing {p(x) : x in b}
    """
    return _interval_eval(_embed(p, b), b, slack)


@dataclass(frozen=True)
class _Derivatives:
    gradient: Tuple[MultiPoly, ...]
    hessian: Tuple[Tuple[MultiPoly, ...], ...]

    @classmethod
    def of(cls, p: MultiPoly) -> '_Derivatives':
        gradient = p.gradient()
        return cls(gradient, tuple(tuple(g.differentiate(v) for v in p.variables) for g in gradient))


def _taylor_upper_bound(p: MultiPoly, b: Box, slack: float, derivatives: _Derivatives) -> float:
    center = b.midpoint
    w = b.half_widths(center)
    at_center = b.degenerate(center)

    pieces = [_interval_eval(p, at_center, slack).hi]
    for g, wi in zip(derivatives.gradient, w):
        if wi:
            pieces.append(_interval_eval(g, at_center, slack).magnitude() * wi)

    for i, row in enumerate(derivatives.hessian):
        for j, h in enumerate(row):
            if w[i] and w[j] and not h.is_zero():
                pieces.append(0.5 * _interval_eval(h, b, slack).magnitude() * w[i] * w[j])

    return math.fsum(pieces) + slack * math.fsum(abs(piece) for piece in pieces) + _TINY


def taylor_upper_bound(p: MultiPoly, b: Box, slack: float = settings.DEFAULT_SLACK_FACTOR) -> float:
    """
    Second order Taylor bound around the box center y with half widths w:

        p(y) + sum_i |dp/dx_i(y)| w_i + 1/2 sum_ij H_ij w_i w_j

    H_ij is the largest magnitude of the interval extension of d2p/dx_i dx_j over the box.

    :param p: polynomial whose variables are a subset of the box dimensions
    :param b: Box
    :param slack: relative outward slack
    :return: upper bound of p over b
    """
    embedded = _embed(p, b)
    return _taylor_upper_bound(embedded, b, slack, _Derivatives.of(embedded))


def _monotone_collapse(b: Box, derivatives: _Derivatives, slack: float) -> Tuple[Box, bool]:
    """
    Where dp/dx_i keeps a strict sign over the box the maximum lies on one face, so that dimension collapses
    """
    collapsed = b
    changed = False
    for i, g in enumerate(derivatives.gradient):
        if collapsed.intervals[i].width == 0.0 or g.is_zero():
            continue

        slope = _interval_eval(g, collapsed, slack)
        if slope.lo > 0.0:
            collapsed = collapsed.face(i, upper=True)
            changed = True
        elif slope.hi < 0.0:
            collapsed = collapsed.face(i, upper=False)
            changed = True

    return collapsed, changed


def verify_ineq(p: MultiPoly, b: Box, cfg: VerifyConfig = None) -> Certificate:
    """
    Branch and bound decision of "for all x in b, p(x) < epsilon"

    Boxes are processed first in first out. A box passes when min(interval hi, Taylor bound) is below
    epsilon minus slack; otherwise its center is tested as a counterexample and the box is bisected along
    its widest dimension. Boxes at max_depth that still fail are kept as unresolved and sampled at random
    before the run is declared Inconclusive.

    :param p: polynomial whose variables are a subset of the box dimensions
    :param b: Box
    :param cfg: VerifyConfig
    :return: Certificate
    """
    cfg = cfg or VerifyConfig()
    started = time.perf_counter()
    embedded = _embed(p, b)
    derivatives = _Derivatives.of(embedded)
    slack = cfg.slack_factor
    threshold = cfg.threshold

    certificate = Certificate(status=CertificateStatus.VERIFIED, polynomial=embedded.to_text(), box=b, config=cfg)
    queue = deque([(b, 0)])
    unresolved: List[Box] = list()
    budget_exhausted = False

    def finish(status: CertificateStatus, **kwargs) -> Certificate:
        result = replace(certificate, status=status, unresolved_boxes=len(unresolved), **kwargs)
        result.elapsed = time.perf_counter() - started
        logger.debug(f'verify_ineq {status.value}: boxes={result.boxes_processed} '
                     f'interval={result.pass_interval} taylor={result.pass_taylor} mono={result.pass_mono} '
                     f'unresolved={result.unresolved_boxes}')
        return result

    while queue:
        if certificate.boxes_processed >= cfg.max_boxes:
            logger.warning(f'Box budget of {cfg.max_boxes} exhausted with {len(queue)} boxes pending')
            unresolved.extend(box for box, _ in queue)
            budget_exhausted = True
            queue.clear()
            break

        box, depth = queue.popleft()
        certificate.boxes_processed += 1
        certificate.max_depth_reached = max(certificate.max_depth_reached, depth)

        if cfg.use_monotonicity:
            box, collapsed = _monotone_collapse(box, derivatives, slack)
            if collapsed:
                certificate.pass_mono += 1

        upper = _interval_eval(embedded, box, slack).hi
        if upper < threshold:
            certificate.pass_interval += 1
            continue

        taylor = _taylor_upper_bound(embedded, box, slack, derivatives)
        if taylor < threshold:
            certificate.pass_taylor += 1
            continue

        bound = min(upper, taylor)
        center = box.midpoint
        value = embedded.eval(center)
        if not math.isfinite(bound) or not math.isfinite(value):
            return finish(CertificateStatus.INCONCLUSIVE, reason='numeric')

        if value >= cfg.epsilon:
            return finish(CertificateStatus.FALSIFIED, witness=center, value=value)

        if depth >= cfg.max_depth or box.intervals[box.widest_dimension()].width == 0.0:
            unresolved.append(box)
            continue

        for half in box.bisect(box.widest_dimension()):
            queue.append((half, depth + 1))

    if not unresolved:
        return finish(CertificateStatus.VERIFIED)

    reason = 'max_boxes' if budget_exhausted else 'max_depth'
    witness = _random_search(embedded, unresolved, cfg)
    if witness is not None:
        return finish(CertificateStatus.FALSIFIED, witness=witness[0], value=witness[1])

    logger.warning(f'{len(unresolved)} boxes unresolved, result is inconclusive ({reason})')
    return finish(CertificateStatus.INCONCLUSIVE, reason=reason)


def _random_search(p: MultiPoly, boxes: List[Box], cfg: VerifyConfig) -> Optional[Tuple[Tuple[float, ...], float]]:
    if not cfg.random_samples:
        return None

    rng = np.random.default_rng(cfg.seed)
    for box in boxes:
        points = box.sample(rng, cfg.random_samples)
        values = p.eval_many(points)
        for k in np.flatnonzero(values >= cfg.epsilon - cfg.slack_factor * max(1.0, abs(cfg.epsilon))):
            point = tuple(float(v) for v in points[k])
            value = p.eval(point)
            if value >= cfg.epsilon:
                return point, value

    return None
