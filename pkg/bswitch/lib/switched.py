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
Switched linear systems and their Bernstein blended (B-switched) counterpart

A standard switched system follows dx/dt = A_active x with the active subsystem picked by a crisp rule.
The blended system follows dx/dt = sum_i sigma_i A_i x, the sigma_i being Bernstein interpolants of the
switching signal that sum to one.
"""

import logging
import math
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import Callable
from typing import Sequence
from typing import Tuple

import numpy as np

from bswitch import settings
from bswitch.lib import bernstein
from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import NoActiveSubsystemException
from bswitch.lib.exceptions import SimulationException
from bswitch.lib.exceptions import SwitchingRuleException

logger = logging.getLogger(__name__)


class SimulationMode(Enum):
    STANDARD = 'standard'
    BLENDED = 'blended'


class TrajectoryStatus(Enum):
    COMPLETED = 'completed'
    DIVERGED = 'diverged'


@dataclass(frozen=True)
class LinearSubsystem:
    A: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.A, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchException(f'Subsystem matrix must be square, got shape {matrix.shape}')

        if not np.all(np.isfinite(matrix)):
            raise DimensionMismatchException('Subsystem matrix has non-finite entries')

        matrix.setflags(write=False)
        object.__setattr__(self, 'A', matrix)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x


def _normalize_windows(windows) -> Tuple[Tuple[Tuple[float, float], ...], ...]:
    normalized = list()
    for per_subsystem in windows:
        entries = list()
        for t0, t1 in per_subsystem:
            t0, t1 = float(t0), float(t1)
            if not 0.0 <= t0 < t1 <= 1.0:
                raise SwitchingRuleException(f'Pulse window [{t0}, {t1}] must satisfy 0 <= t0 < t1 <= 1')
            entries.append((t0, t1))
        normalized.append(tuple(entries))

    # interiors of windows that belong to different subsystems may not overlap
    for i, wi in enumerate(normalized):
        for j in range(i + 1, len(normalized)):
            for a0, a1 in wi:
                for b0, b1 in normalized[j]:
                    if max(a0, b0) < min(a1, b1):
                        raise SwitchingRuleException(f'Windows [{a0}, {a1}] of subsystem {i + 1} and '
                                                     f'[{b0}, {b1}] of subsystem {j + 1} overlap')

    return tuple(normalized)


class SwitchingRule:
    """
    Base class of the switching rules. Crisp rules pick one active subsystem, blended rules return
    convex weights.
    """
    kind = ''
    is_blended = False
    time_based = False

    def validate(self, n_subsystems: int, n_states: int) -> None:
        return None

    def crisp(self) -> 'SwitchingRule':
        return self

    def active_index(self, t: float, x: np.ndarray) -> int:
        raise SwitchingRuleException(f'Rule {self.kind} has no crisp selection')

    def weights(self, t: float, x: np.ndarray) -> np.ndarray:
        raise SwitchingRuleException(f'Rule {self.kind} is crisp; blended simulation needs state_sign or '
                                     f'time_pulse')


def _orientation(active_when: str) -> float:
    if active_when not in bernstein.ACTIVE_WHEN:
        raise SwitchingRuleException(f'active_when must be one of {bernstein.ACTIVE_WHEN}, got {active_when}')

    return 1.0 if active_when == 'positive' else -1.0


def _check_state_sign(kind: str, delta: float, n_subsystems: int, n_states: int) -> None:
    if not (delta > 0 and math.isfinite(delta)):
        raise SwitchingRuleException(f'{kind}: delta must be positive and finite, got {delta}')

    if n_subsystems != 2:
        raise SwitchingRuleException(f'{kind} rules are only defined for exactly 2 subsystems, got {n_subsystems}')

    if n_states < 2:
        raise SwitchingRuleException(f'{kind} rules switch on x1 * x2 and need at least 2 states')


@dataclass(frozen=True)
class CrispStateSign(SwitchingRule):
    delta: float = settings.DEFAULT_DELTA
    active_when: str = 'positive'
    kind = 'crisp_state_sign'

    def __post_init__(self):
        _orientation(self.active_when)

    def validate(self, n_subsystems: int, n_states: int) -> None:
        _check_state_sign(self.kind, self.delta, n_subsystems, n_states)

    def active_index(self, t: float, x: np.ndarray) -> int:
        # the tie at delta * x1 * x2 == 0 goes to subsystem 1
        return 0 if _orientation(self.active_when) * self.delta * x[0] * x[1] >= 0 else 1


@dataclass(frozen=True)
class StateSign(SwitchingRule):
    delta: float = settings.DEFAULT_DELTA
    m: int = settings.DEFAULT_DEGREE
    composed: bool = False
    depth: int = 1
    active_when: str = 'positive'
    kind = 'state_sign'
    is_blended = True
    _weight: bernstein.SignWeight = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise SwitchingRuleException(f'{self.kind}: delta must be positive and finite, got {self.delta}')

        _orientation(self.active_when)
        weight = bernstein.SignWeight(self.m, self.delta, self.composition_depth, active_when=self.active_when)
        object.__setattr__(self, '_weight', weight)

    @property
    def composition_depth(self) -> int:
        return self.depth if self.composed else 0

    @property
    def sign_weight(self) -> bernstein.SignWeight:
        return self._weight

    def validate(self, n_subsystems: int, n_states: int) -> None:
        _check_state_sign(self.kind, self.delta, n_subsystems, n_states)

    def crisp(self) -> SwitchingRule:
        return CrispStateSign(self.delta, self.active_when)

    def weights(self, t: float, x: np.ndarray) -> np.ndarray:
        w = self._weight(x[0], x[1])
        return np.array([w, 1.0 - w])


@dataclass(frozen=True)
class CrispTimePulse(SwitchingRule):
    windows: tuple = ()
    kind = 'crisp_time_pulse'
    time_based = True

    def __post_init__(self):
        object.__setattr__(self, 'windows', _normalize_windows(self.windows))

    def validate(self, n_subsystems: int, n_states: int) -> None:
        if len(self.windows) != n_subsystems:
            raise SwitchingRuleException(f'{self.kind}: expected windows for {n_subsystems} subsystems, '
                                         f'got {len(self.windows)}')

    def active_index(self, t: float, x: np.ndarray) -> int:
        for i, per_subsystem in enumerate(self.windows):
            for t0, t1 in per_subsystem:
                if t0 <= t <= t1:
                    return i

        raise NoActiveSubsystemException(f'No subsystem window contains t={t}')


@dataclass(frozen=True)
class TimePulse(SwitchingRule):
    windows: tuple = ()
    m: int = settings.DEFAULT_DEGREE
    kind = 'time_pulse'
    is_blended = True
    time_based = True
    _series: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        object.__setattr__(self, 'windows', _normalize_windows(self.windows))
        series = tuple(bernstein.window_interpolant(self.m, w) for w in self.windows if w)
        object.__setattr__(self, '_series', series)

    def validate(self, n_subsystems: int, n_states: int) -> None:
        if len(self.windows) != n_subsystems or not all(self.windows):
            raise SwitchingRuleException(f'{self.kind}: expected at least one window for each of '
                                         f'{n_subsystems} subsystems')

    def crisp(self) -> SwitchingRule:
        return CrispTimePulse(self.windows)

    def weights(self, t: float, x: np.ndarray) -> np.ndarray:
        raw = np.array([s.evaluate(t, method='nested') for s in self._series])
        total = float(raw.sum())
        if total <= 0.0:
            logger.warning(f'All pulse weights vanish at t={t}, falling back to uniform weights')
            raw = np.ones(len(raw))
            total = float(len(raw))

        weights = raw / total
        weights[-1] = max(0.0, 1.0 - math.fsum(weights[:-1]))
        return weights


@dataclass(frozen=True)
class SwitchedSystem:
    subsystems: Tuple[LinearSubsystem, ...]
    rule: SwitchingRule
    name: str = ''
    _stack: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        subsystems = tuple(s if isinstance(s, LinearSubsystem) else LinearSubsystem(s) for s in self.subsystems)
        if len(subsystems) < 2:
            raise SwitchingRuleException(f'A switched system needs at least 2 subsystems, got {len(subsystems)}')

        dimensions = {s.n for s in subsystems}
        if len(dimensions) != 1:
            raise DimensionMismatchException(f'Subsystems have mixed dimensions {sorted(dimensions)}')

        if not isinstance(self.rule, SwitchingRule):
            raise SwitchingRuleException(f'Unsupported switching rule {self.rule!r}')

        self.rule.validate(len(subsystems), subsystems[0].n)

        stack = np.stack([s.A for s in subsystems])
        stack.setflags(write=False)
        object.__setattr__(self, 'subsystems', subsystems)
        object.__setattr__(self, '_stack', stack)

    @property
    def n(self) -> int:
        return self.subsystems[0].n

    @property
    def matrices(self) -> np.ndarray:
        return self._stack

    def _check_state(self, x) -> np.ndarray:
        state = np.asarray(x, dtype=float)
        if state.shape != (self.n,):
            raise DimensionMismatchException(f'Expected a state of dimension {self.n}, got shape {state.shape}')
        return state


def rhs_standard(system: SwitchedSystem, t: float, x) -> np.ndarray:
    """
    dx/dt of the standard switched system: A_active x, with the active subsystem picked by the crisp
    counterpart of the system rule

    :param system: SwitchedSystem
    :param t: time
    :param x: state
    :return: state derivative
    """
    state = system._check_state(x)
    index = system.rule.crisp().active_index(t, state)
    return system.matrices[index] @ state


def blend_weights(rule: SwitchingRule, t: float, x) -> np.ndarray:
    """
    Convex switching weights (sigma_1, ..., sigma_n) of a blended rule

    :param rule: StateSign or TimePulse
    :param t: time
    :param x: state
    :return: weights in [0, 1] summing to one
    """
    if not rule.is_blended:
        raise SwitchingRuleException(f'Rule {rule.kind} is crisp; blend weights need state_sign or time_pulse')

    return rule.weights(t, np.asarray(x, dtype=float))


def rhs_bswitched(system: SwitchedSystem, t: float, x) -> np.ndarray:
    """
    dx/dt of the B-switched system: sum_i sigma_i(t, x) A_i x
    """
    state = system._check_state(x)
    weights = blend_weights(system.rule, t, state)
    return np.tensordot(weights, system.matrices, axes=1) @ state


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    weights: np.ndarray
    mode: SimulationMode
    status: TrajectoryStatus = TrajectoryStatus.COMPLETED

    @property
    def diverged(self) -> bool:
        return self.status is TrajectoryStatus.DIVERGED

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return len(self.times)


def _rk4_step(f: Callable, t: float, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(system: SwitchedSystem, x0: Sequence[float], t_end: float, dt: float,
             mode=SimulationMode.STANDARD, divergence_threshold: float = settings.DIVERGENCE_THRESHOLD) -> Trajectory:
    """
    Fixed step classical Runge-Kutta integration of the standard or blended dynamics from t = 0 to t_end

    Switching is re-evaluated at every stage. The run stops early with a diverged status once the state
    sup norm exceeds divergence_threshold.

    :param system: SwitchedSystem to integrate
    :param x0: initial state
    :param t_end: final time, > 0 (at most 1 for time pulse rules)
    :param dt: step size, > 0
    :param mode: SimulationMode or its string value
    :param divergence_threshold: sup norm guard
    :return: Trajectory
    """
    mode = SimulationMode(mode)
    if not (dt > 0 and math.isfinite(dt)):
        raise SimulationException(f'Step size must be positive and finite, got {dt}')

    if not (t_end > 0 and math.isfinite(t_end)):
        raise SimulationException(f'Final time must be positive and finite, got {t_end}')

    x = system._check_state(x0).copy()
    if not np.all(np.isfinite(x)):
        raise SimulationException('Initial state is not finite', last_valid_time=None)

    if system.rule.time_based and t_end > 1.0:
        raise SwitchingRuleException(f'Time pulse rules are defined on [0, 1] only, t_end={t_end}')

    if mode is SimulationMode.BLENDED:
        if not system.rule.is_blended:
            raise SwitchingRuleException(f'Blended simulation needs a blended rule, got {system.rule.kind}')

        def f(t, state):
            return rhs_bswitched(system, t, state)

        def weights_at(t, state):
            return blend_weights(system.rule, t, state)
    else:
        crisp = system.rule.crisp()
        k = len(system.subsystems)

        def f(t, state):
            return system.matrices[crisp.active_index(t, state)] @ state

        def weights_at(t, state):
            one_hot = np.zeros(k)
            one_hot[crisp.active_index(t, state)] = 1.0
            return one_hot

    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    times = [0.0]
    states = [x.copy()]
    weights = [weights_at(0.0, x)]
    status = TrajectoryStatus.COMPLETED

    t = 0.0
    for step in range(1, n_steps + 1):
        t_next = t_end if step == n_steps else step * dt
        x_next = _rk4_step(f, t, x, t_next - t)

        if not np.all(np.isfinite(x_next)):
            raise SimulationException(f'Non-finite state after t={t}', last_valid_time=t)

        t, x = t_next, x_next
        times.append(t)
        states.append(x)
        weights.append(weights_at(t, x))

        if np.max(np.abs(x)) > divergence_threshold:
            logger.warning(f'{mode.value} simulation diverged at t={t}: |x|_inf > {divergence_threshold}')
            status = TrajectoryStatus.DIVERGED
            break

    logger.debug(f'{mode.value} simulation finished with {len(times)} samples, status {status.value}')
    return Trajectory(times=np.array(times), states=np.array(states), weights=np.array(weights),
                      mode=mode, status=status)


def sup_norm_gap(a: Trajectory, b: Trajectory) -> float:
    """
    Largest state difference over the samples both trajectories share
    """
    common = min(len(a), len(b))
    if not np.allclose(a.times[:common], b.times[:common]):
        raise DimensionMismatchException('Trajectories were not sampled on the same time grid')

    return float(np.max(np.abs(a.states[:common] - b.states[:common])))
