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
Lyapunov candidates and Lie derivatives along polynomial vector fields
"""

import logging
from dataclasses import dataclass
from typing import Sequence
from typing import Tuple

import numpy as np

from bswitch.lib import bernstein
from bswitch.lib import verifier
from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import ExpansionLimitException
from bswitch.lib.exceptions import LyapunovCandidateException
from bswitch.lib.exceptions import SwitchingRuleException
from bswitch.lib.exceptions import UnknownVariableException
from bswitch.lib.poly import MultiPoly
from bswitch.lib.poly import state_variables
from bswitch.lib.switched import StateSign
from bswitch.lib.switched import SwitchedSystem

logger = logging.getLogger(__name__)

# normalized variable of the sign series before it is mapped onto the state
_BLEND_VARIABLE = 't'


@dataclass(frozen=True)
class LyapunovCandidate:
    V: MultiPoly

    def __post_init__(self):
        if not isinstance(self.V, MultiPoly):
            raise LyapunovCandidateException(f'Lyapunov candidate must be a polynomial, got {type(self.V)}')

        if self.V.constant_term() != 0.0:
            raise LyapunovCandidateException(f'Lyapunov candidate must vanish at the origin, '
                                             f'constant term is {self.V.constant_term()}')

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.V.variables

    def __call__(self, x) -> float:
        return self.V.eval(x)


@dataclass(frozen=True)
class PolyVectorField:
    components: Tuple[MultiPoly, ...]

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise DimensionMismatchException('A vector field needs at least one component')

        names = state_variables(len(components))
        try:
            components = tuple(c.with_variables(names) for c in components)
        except UnknownVariableException as uve:
            raise DimensionMismatchException(f'Vector field components must use the state variables {names}: {uve}')

        object.__setattr__(self, 'components', components)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.components[0].variables

    def evaluate(self, x) -> np.ndarray:
        return np.array([c.eval(x) for c in self.components])

    def __len__(self):
        return self.n


def quadratic_candidate(P, variables: Sequence[str] = None) -> LyapunovCandidate:
    """
    V(x) = x^T P x

    :param P: symmetric n x n matrix
    :param variables: state variable names, x1..xn by default
    :return: LyapunovCandidate
    """
    matrix = np.array(P, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchException(f'P must be square, got shape {matrix.shape}')

    if not np.all(np.isfinite(matrix)):
        raise LyapunovCandidateException('P has non-finite entries')

    if not np.allclose(matrix, matrix.T, rtol=1e-12, atol=1e-12):
        raise LyapunovCandidateException('P must be symmetric')

    n = matrix.shape[0]
    names = tuple(variables) if variables is not None else state_variables(n)
    if len(names) != n:
        raise DimensionMismatchException(f'{n} variables expected, got {names}')

    terms = dict()
    for i in range(n):
        for j in range(i, n):
            exponents = [0] * n
            exponents[i] += 1
            exponents[j] += 1
            terms[tuple(exponents)] = matrix[i, i] if i == j else matrix[i, j] + matrix[j, i]

    return LyapunovCandidate(MultiPoly(names, terms))


def is_positive_definite(P) -> bool:
    """
    Sylvester's criterion: every leading principal minor strictly positive
    """
    matrix = np.array(P, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False

    if not np.allclose(matrix, matrix.T, rtol=1e-12, atol=1e-12):
        return False

    return all(np.linalg.det(matrix[:k, :k]) > 0 for k in range(1, matrix.shape[0] + 1))


def lie_derivative(V, f: PolyVectorField) -> MultiPoly:
    """
    Vdot = sum_i dV/dx_i * f_i

    :param V: LyapunovCandidate or MultiPoly over the field's state variables
    :param f: PolyVectorField
    :return: MultiPoly over the state variables
    """
    candidate = V.V if isinstance(V, LyapunovCandidate) else V
    try:
        candidate = candidate.with_variables(f.variables)
    except UnknownVariableException as uve:
        raise DimensionMismatchException(f'Candidate and vector field do not share variables: {uve}')

    result = MultiPoly.constant(0.0, f.variables)
    for name, component in zip(f.variables, f.components):
        result = result.add(candidate.differentiate(name).mul(component))

    logger.debug(f'Lie derivative has {len(result.terms)} terms of degree {result.degree()}')
    return result


def vector_field_from_linear(A) -> PolyVectorField:
    matrix = np.array(A, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchException(f'A must be square, got shape {matrix.shape}')

    names = state_variables(matrix.shape[0])
    return PolyVectorField(tuple(MultiPoly.linear(row, names) for row in matrix))


def blend_weight_polynomial(rule: StateSign, n: int, max_degree: int = None) -> MultiPoly:
    """
    First subsystem weight as a polynomial in the state: the sign series expanded in its normalized
    variable t, with t = (s * delta * x1 * x2 + 1) / 2 substituted; s is -1 when the first subsystem is
    active on x1 * x2 < 0, else 1. Clamping is lost, so the result only agrees with the simulated weight
    where |delta * x1 * x2| <= 1.
    """
    if rule.composition_depth:
        raise ExpansionLimitException('Composed sign rules cannot be expanded into monomials; '
                                      'use a single stage rule for verification')

    names = state_variables(n)
    expanded = bernstein.to_poly(rule.sign_weight.series, _BLEND_VARIABLE, max_degree=max_degree)
    scale = rule.sign_weight.orientation * rule.delta * 0.5
    product = MultiPoly(names, {tuple(1 if i < 2 else 0 for i in range(n)): scale})
    domain_map = product.add(MultiPoly.constant(0.5, names))
    return expanded.substitute(_BLEND_VARIABLE, domain_map).with_variables(names)


def vector_field_bswitched(system: SwitchedSystem, max_degree: int = None) -> PolyVectorField:
    """
    Polynomial form of the B-switched dynamics W(x) A1 x + (1 - W(x)) A2 x

    :param system: two subsystem system with a state sign rule
    :param max_degree: monomial expansion limit, settings.TO_POLY_MAX_DEGREE by default
    :return: PolyVectorField valid on {x : |delta * x1 * x2| <= 1}
    """
    if not isinstance(system.rule, StateSign):
        raise SwitchingRuleException(f'Polynomial B-switched fields need a state_sign rule, got {system.rule.kind}')

    n = system.n
    weight = blend_weight_polynomial(system.rule, n, max_degree=max_degree)
    complement = MultiPoly.constant(1.0, weight.variables).sub(weight)

    first = vector_field_from_linear(system.subsystems[0].A)
    second = vector_field_from_linear(system.subsystems[1].A)
    components = tuple(weight.mul(a).add(complement.mul(b)) for a, b in zip(first.components, second.components))

    logger.debug(f'B-switched field of degree {max(c.degree() for c in components)} for m={system.rule.m}')
    return PolyVectorField(components)


def verify_lyapunov(V, field: PolyVectorField, box, cfg=None):
    """
    Certify Vdot(x) < epsilon on a box

    :param V: LyapunovCandidate or MultiPoly
    :param field: PolyVectorField
    :param box: verifier.Box over the state variables
    :param cfg: verifier.VerifyConfig
    :return: verifier.Certificate
    """
    derivative = lie_derivative(V, field)
    return verifier.verify_ineq(derivative, box, cfg or verifier.VerifyConfig())
