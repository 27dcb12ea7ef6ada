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
Bernstein basis and series machinery

A BernsteinSeries of degree m samples a scalar function at m + 1 equally spaced nodes of its domain and
evaluates sum_r samples[r] * C(m, r) t^r (1 - t)^(m - r) at the normalized argument t. The switching
interpolants (state sign step, time pulses) are series with 0 / 0.5 / 1 samples.
"""

import logging
import math
from fractions import Fraction
from typing import Callable
from typing import Iterable
from typing import List
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy.special import comb
from scipy.stats import binom

from bswitch import settings
from bswitch.lib.exceptions import BernsteinDomainException
from bswitch.lib.exceptions import ExpansionLimitException
from bswitch.lib.exceptions import NonFiniteSampleException
from bswitch.lib.poly import MultiPoly

logger = logging.getLogger(__name__)

EVAL_METHODS = ('casteljau', 'nested')

# sign of x1 * x2 on which the first subsystem is active
ACTIVE_WHEN = ('positive', 'negative')


def _check_degree(m: int) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise BernsteinDomainException(f'Bernstein degree must be a positive integer, got {m}')

    if m > settings.MAX_SERIES_DEGREE:
        raise BernsteinDomainException(f'Bernstein degree {m} exceeds the supported maximum '
                                       f'{settings.MAX_SERIES_DEGREE}')

    return int(m)


def basis(m: int, r: int, t: float) -> float:
    """
    Single Bernstein basis value C(m, r) t^r (1 - t)^(m - r)

    Evaluated as a binomial probability mass, which scipy computes without forming factorials, so
    degrees in the hundreds stay accurate.

    :param m: degree
    :param r: index, 0 <= r <= m
    :param t: argument in [0, 1]
    :return: basis value in [0, 1]
    """
    m = _check_degree(m)
    if int(r) != r or r < 0 or r > m:
        raise BernsteinDomainException(f'Basis index {r} outside 0..{m}')

    if not 0.0 <= t <= 1.0:
        raise BernsteinDomainException(f'Basis argument {t} outside [0, 1]')

    if t == 0.0:
        return 1.0 if r == 0 else 0.0

    if t == 1.0:
        return 1.0 if r == m else 0.0

    return float(min(1.0, max(0.0, binom.pmf(int(r), m, t))))


def basis_vector(m: int, t: float) -> np.ndarray:
    """
    All m + 1 basis values at t, same scheme as basis()
    """
    m = _check_degree(m)
    if not 0.0 <= t <= 1.0:
        raise BernsteinDomainException(f'Basis argument {t} outside [0, 1]')

    values = np.zeros(m + 1)
    if t == 0.0:
        values[0] = 1.0
    elif t == 1.0:
        values[m] = 1.0
    else:
        values = np.clip(binom.pmf(np.arange(m + 1), m, t), 0.0, 1.0)

    return values


class BernsteinSeries:
    """
    Degree m Bernstein approximant on a domain [lo, hi]

    samples[r] is the sampled function value at lo + (r / m) * (hi - lo). Arguments outside the domain
    clamp to the nearest endpoint.
    """

    def __init__(self, samples: Sequence[float], domain: Tuple[float, float] = (0.0, 1.0)):
        values = np.array(samples, dtype=float)
        if values.ndim != 1:
            raise BernsteinDomainException('Samples must be a flat sequence')

        _check_degree(len(values) - 1)

        lo, hi = float(domain[0]), float(domain[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise BernsteinDomainException(f'Invalid domain [{lo}, {hi}]')

        for r, v in enumerate(values):
            if not math.isfinite(v):
                raise NonFiniteSampleException(f'Non-finite sample {v} at node {r}')

        values.setflags(write=False)
        self._samples = values
        self._domain = (lo, hi)
        self._sample_lo = float(values.min())
        self._sample_hi = float(values.max())

        # scaled coefficients for the nested scheme, forward and mirrored
        m = len(values) - 1
        binomials = comb(m, np.arange(m + 1))
        self._scaled = [float(v) for v in values * binomials]
        self._scaled_mirror = self._scaled[::-1]

    @property
    def m(self) -> int:
        return len(self._samples) - 1

    @property
    def domain(self) -> Tuple[float, float]:
        return self._domain

    @property
    def samples(self) -> np.ndarray:
        return self._samples

    def normalize(self, x: float) -> float:
        """
        Map x to t in [0, 1], clamping outside the domain
        """
        lo, hi = self._domain
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0

        return min(1.0, max(0.0, (x - lo) / (hi - lo)))

    def _hull(self, value: float) -> float:
        # the series is a convex combination of its samples
        return min(self._sample_hi, max(self._sample_lo, value))

    def evaluate(self, x: float, method: str = 'casteljau') -> float:
        """
        Evaluate the series at x

        :param x: argument in the domain units, clamped to the domain
        :param method: 'casteljau' (reference recurrence) or 'nested' (linear time, used on hot paths)
        :return: series value
        """
        t = self.normalize(float(x))
        if method == 'casteljau':
            return self._hull(self._casteljau(t))
        elif method == 'nested':
            return self._hull(self._nested(t))

        raise BernsteinDomainException(f'Unknown evaluation method {method}, expected one of {EVAL_METHODS}')

    def __call__(self, x: float) -> float:
        return self.evaluate(x)

    def _casteljau(self, t: float) -> float:
        b = self._samples
        s = 1.0 - t
        for _ in range(self.m):
            b = b[:-1] * s + b[1:] * t

        return float(b[0])

    def _nested(self, t: float) -> float:
        if t <= 0.5:
            coefficients, u = self._scaled, t
        else:
            coefficients, u = self._scaled_mirror, 1.0 - t

        if u == 0.0:
            return coefficients[0]

        s = u / (1.0 - u)
        acc = coefficients[-1]
        for c in reversed(coefficients[:-1]):
            acc = acc * s + c

        return acc * (1.0 - u) ** self.m

    def evaluate_many(self, xs: Iterable[float]) -> np.ndarray:
        """
        Vectorized de Casteljau over many arguments
        """
        lo, hi = self._domain
        x = np.asarray(list(xs) if not isinstance(xs, np.ndarray) else xs, dtype=float)
        t = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
        t = np.where(x <= lo, 0.0, np.where(x >= hi, 1.0, t))
        s = 1.0 - t
        b = np.repeat(self._samples[:, np.newaxis], len(t), axis=1)
        for _ in range(self.m):
            b = b[:-1] * s + b[1:] * t

        return np.clip(b[0], self._sample_lo, self._sample_hi)

    def __repr__(self):
        return f'BernsteinSeries(m={self.m}, domain={self._domain})'


def series_from_function(f: Callable[[float], float], m: int, domain: Tuple[float, float] = (0.0, 1.0)) \
        -> BernsteinSeries:
    """
    Sample f at the m + 1 Bernstein nodes of domain

    :param f: scalar function defined on the domain
    :param m: degree
    :param domain: (lo, hi)
    :return: BernsteinSeries
    """
    m = _check_degree(m)
    lo, hi = float(domain[0]), float(domain[1])
    samples = list()
    for r in range(m + 1):
        x = lo + (r / m) * (hi - lo)
        value = float(f(x))
        if not math.isfinite(value):
            raise NonFiniteSampleException(f'Function value {value} is not finite at node r={r}, x={x}')
        samples.append(value)

    return BernsteinSeries(samples, (lo, hi))


def eval_series(s: BernsteinSeries, x: float) -> float:
    return s.evaluate(x)


def step_series(m: int, domain: Tuple[float, float] = (-1.0, 1.0), jump: float = None) -> BernsteinSeries:
    """
    Series of the 0 / 1 step that jumps at `jump` (domain midpoint by default). A node landing exactly on
    the jump samples 0.5.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if jump is None:
        jump = lo + 0.5 * (hi - lo)

    def step(x: float) -> float:
        if x == jump:
            return 0.5
        return 1.0 if x > jump else 0.0

    return series_from_function(step, m, (lo, hi))


class ComposedSignal:
    """
    x -> outer(inner(x)), inner being a BernsteinSeries or another ComposedSignal
    """

    def __init__(self, outer: BernsteinSeries, inner):
        self.outer = outer
        self.inner = inner

    @property
    def domain(self) -> Tuple[float, float]:
        return self.inner.domain

    def evaluate(self, x: float, method: str = 'casteljau') -> float:
        return self.outer.evaluate(self.inner.evaluate(x, method=method), method=method)

    def __call__(self, x: float) -> float:
        return self.evaluate(x)

    def evaluate_many(self, xs) -> np.ndarray:
        return self.outer.evaluate_many(self.inner.evaluate_many(xs))


def compose(outer: BernsteinSeries, inner) -> ComposedSignal:
    return ComposedSignal(outer, inner)


class SignWeight:
    """
    State sign switching weight w(x1, x2) = step series evaluated at u = delta * x1 * x2 on [-1, 1]

    w is the weight of the first subsystem, 1 - w the weight of the second; both lie in [0, 1]. With
    active_when='negative' the first subsystem owns the region x1 * x2 < 0 and u is negated.
    """

    def __init__(self, m: int, delta: float, depth: int = 0, method: str = 'nested', active_when: str = 'positive'):
        if active_when not in ACTIVE_WHEN:
            raise BernsteinDomainException(f'active_when must be one of {ACTIVE_WHEN}, got {active_when}')

        if not delta > 0 or not math.isfinite(delta):
            raise BernsteinDomainException(f'delta must be a positive finite scale, got {delta}')

        if depth < 0:
            raise BernsteinDomainException(f'Composition depth must be >= 0, got {depth}')

        self.m = _check_degree(m)
        self.delta = float(delta)
        self.depth = int(depth)
        self.method = method
        self.active_when = active_when
        self.orientation = 1.0 if active_when == 'positive' else -1.0
        self.series = step_series(self.m, (-1.0, 1.0))

        signal = self.series
        if self.depth:
            # outer stages act on weights, so they jump at 0.5 on [0, 1]
            outer = step_series(self.m, (0.0, 1.0))
            for _ in range(self.depth):
                signal = compose(outer, signal)
        self.signal = signal

    def of_product(self, u: float) -> float:
        return min(1.0, max(0.0, self.signal.evaluate(u, method=self.method)))

    def __call__(self, x1: float, x2: float) -> float:
        return self.of_product(self.orientation * self.delta * x1 * x2)

    def pair(self, x1: float, x2: float) -> Tuple[float, float]:
        w = self(x1, x2)
        return w, 1.0 - w


def sign_interpolant(m: int, delta: float, depth: int = 0, active_when: str = 'positive') -> SignWeight:
    return SignWeight(m, delta, depth, active_when=active_when)


def merge_windows(windows: Iterable[Tuple[float, float]]) -> List[Tuple[float, float]]:
    """
    Validate and merge overlapping or touching windows inside [0, 1]
    """
    cleaned = list()
    for t0, t1 in windows:
        t0, t1 = float(t0), float(t1)
        if not 0.0 <= t0 < t1 <= 1.0:
            raise BernsteinDomainException(f'Pulse window [{t0}, {t1}] must satisfy 0 <= t0 < t1 <= 1')
        cleaned.append((t0, t1))

    merged = list()
    for t0, t1 in sorted(cleaned):
        if merged and t0 <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], t1))
        else:
            merged.append((t0, t1))

    return merged


def window_interpolant(m: int, windows: Iterable[Tuple[float, float]]) -> BernsteinSeries:
    """
    Series on [0, 1] of the indicator of a union of time windows. Interior window edges sample 0.5, edges
    on the domain boundary are not jumps.
    """
    merged = merge_windows(windows)
    if not merged:
        raise BernsteinDomainException('At least one pulse window is required')

    def indicator(t: float) -> float:
        value = 0.0
        for t0, t1 in merged:
            if t0 < t < t1:
                return 1.0
            if t == t0:
                value = max(value, 1.0 if t0 == 0.0 else 0.5)
            if t == t1:
                value = max(value, 1.0 if t1 == 1.0 else 0.5)
        return value

    return series_from_function(indicator, m, (0.0, 1.0))


def pulse_interpolant(m: int, t0: float, t1: float) -> BernsteinSeries:
    if not t0 < t1:
        raise BernsteinDomainException(f'Pulse start {t0} must be before its end {t1}')

    return window_interpolant(m, [(t0, t1)])


def to_poly(s: BernsteinSeries, variable: str = 't', max_degree: int = None) -> MultiPoly:
    """
    Expand a series into the monomial basis of its normalized variable t

    The coefficient of t^k is C(m, k) times the k-th forward difference of the samples, accumulated in
    exact rational arithmetic and rounded once.

    :param s: the series
    :param variable: name of the normalized variable
    :param max_degree: expansion limit, settings.TO_POLY_MAX_DEGREE by default
    :return: univariate MultiPoly
    """
    limit = settings.TO_POLY_MAX_DEGREE if max_degree is None else max_degree
    if s.m > limit:
        raise ExpansionLimitException(f'Degree {s.m} exceeds the monomial expansion limit {limit}; '
                                      f'monomial coefficients are ill-conditioned there, '
                                      f'use evaluation-only paths instead')

    m = s.m
    samples = [Fraction(float(v)) for v in s.samples]
    terms = dict()
    for k in range(m + 1):
        difference = sum((-1) ** (k - r) * math.comb(k, r) * samples[r] for r in range(k + 1))
        coefficient = math.comb(m, k) * difference
        if coefficient:
            terms[(k,)] = float(coefficient)

    return MultiPoly((variable,), terms)
