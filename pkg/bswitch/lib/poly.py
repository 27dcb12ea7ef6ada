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
Sparse multivariate polynomials over named variables.

Every other module builds on MultiPoly: blended vector fields, Lyapunov derivatives and the verifier bounds.
Values are immutable; all operations return new polynomials.
"""

import logging
import math
import re
from numbers import Number
from types import MappingProxyType
from typing import Dict
from typing import Iterable
from typing import Mapping
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor
from sympy.parsing.sympy_parser import parse_expr
from sympy.parsing.sympy_parser import rationalize
from sympy.parsing.sympy_parser import standard_transformations

from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import PolyParserError
from bswitch.lib.exceptions import UnknownVariableException

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]

# digits before a letter belong to a float literal such as 1e-05
_IDENTIFIER = re.compile(r'(?<![A-Za-z_0-9.])[A-Za-z_][A-Za-z_0-9]*')

_TRANSFORMATIONS = standard_transformations + (convert_xor, rationalize)


def variable_sort_key(name: str) -> tuple:
    """
    Natural lexicographic key, so that x2 sorts before x10

    :param name: variable name
    :return: tuple usable as a sort key
    """
    return tuple((0, int(part)) if part.isdigit() else (1, part) for part in re.split(r'(\d+)', name))


def sort_variables(names: Iterable[str]) -> Tuple[str, ...]:
    return tuple(sorted(set(names), key=variable_sort_key))


def state_variables(n: int) -> Tuple[str, ...]:
    return tuple(f'x{i + 1}' for i in range(n))


class MultiPoly:
    """
    Sparse polynomial: a map from exponent vectors to non-zero float coefficients.

    Variables are always stored in natural lexicographic order. Exponent vectors passed to the
    constructor follow the order of the `variables` argument and are permuted accordingly.
    """
    __slots__ = ('_variables', '_terms')

    def __init__(self, variables: Iterable[str] = (), terms: Mapping[Sequence[int], float] = None):
        names = tuple(variables)
        if len(set(names)) != len(names):
            raise DimensionMismatchException(f'Duplicate variable names in {names}')

        ordered = tuple(sorted(names, key=variable_sort_key))
        permutation = [names.index(v) for v in ordered]

        collected = dict()
        for exponents, coefficient in (terms or dict()).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != len(names):
                raise DimensionMismatchException(f'Exponent vector {exponents} does not match variables {names}')

            if any(e < 0 for e in exponents):
                raise ValueError(f'Negative exponent in {exponents}')

            key = tuple(exponents[i] for i in permutation)
            collected[key] = collected.get(key, 0.0) + float(coefficient)

        # exact zeros only
        self._terms = {k: v for k, v in collected.items() if v != 0.0}
        self._variables = ordered

    @classmethod
    def constant(cls, value: float, variables: Iterable[str] = ()) -> 'MultiPoly':
        names = tuple(variables)
        return cls(names, {(0,) * len(names): value})

    @classmethod
    def variable(cls, name: str, variables: Iterable[str] = None) -> 'MultiPoly':
        names = tuple(variables) if variables is not None else (name,)
        if name not in names:
            raise UnknownVariableException(f'Variable {name} is not in {names}')

        exponents = tuple(1 if v == name else 0 for v in names)
        return cls(names, {exponents: 1.0})

    @classmethod
    def linear(cls, coefficients: Sequence[float], variables: Sequence[str]) -> 'MultiPoly':
        """
        Build sum_j coefficients[j] * variables[j]
        """
        if len(coefficients) != len(variables):
            raise DimensionMismatchException('Linear form needs one coefficient per variable')

        n = len(variables)
        terms = dict()
        for j, c in enumerate(coefficients):
            terms[tuple(1 if k == j else 0 for k in range(n))] = c

        return cls(variables, terms)

    @property
    def variables(self) -> Tuple[str, ...]:
        return self._variables

    @property
    def terms(self) -> Mapping[Exponents, float]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return len(self._variables)

    def is_zero(self) -> bool:
        return len(self._terms) == 0

    def degree(self) -> int:
        """
        Total degree, -1 for the zero polynomial
        """
        if not self._terms:
            return -1

        return max(sum(e) for e in self._terms)

    def coefficient(self, exponents: Sequence[int]) -> float:
        return self._terms.get(tuple(exponents), 0.0)

    def constant_term(self) -> float:
        return self._terms.get((0,) * self.nvars, 0.0)

    def sorted_terms(self) -> list:
        """
        Terms in descending lexicographic exponent order, the canonical order used everywhere
        """
        return sorted(self._terms.items(), key=lambda item: item[0], reverse=True)

    def with_variables(self, variables: Iterable[str]) -> 'MultiPoly':
        """
        Re-express this polynomial over another variable set. Variables that appear in a term must be kept,
        unused variables may be dropped.

        :param variables: the new variable names
        :return: MultiPoly over the new variables
        """
        names = sort_variables(variables)
        if names == self._variables:
            return self

        used = self.used_variables()
        missing = [v for v in used if v not in names]
        if missing:
            raise UnknownVariableException(f'Cannot drop variables {missing} that appear in the polynomial')

        index = {v: i for i, v in enumerate(self._variables)}
        terms = dict()
        for exponents, coefficient in self._terms.items():
            terms[tuple(exponents[index[v]] if v in index else 0 for v in names)] = coefficient

        return MultiPoly(names, terms)

    def used_variables(self) -> Tuple[str, ...]:
        return tuple(v for i, v in enumerate(self._variables) if any(e[i] for e in self._terms))

    def _unify(self, other: 'MultiPoly') -> Tuple['MultiPoly', 'MultiPoly']:
        if self._variables == other._variables:
            return self, other

        names = sort_variables(self._variables + other._variables)
        return self.with_variables(names), other.with_variables(names)

    def _coerce(self, other) -> 'MultiPoly':
        if isinstance(other, MultiPoly):
            return other

        if isinstance(other, Number):
            return MultiPoly.constant(float(other), self._variables)

        return NotImplemented

    def add(self, other: 'MultiPoly') -> 'MultiPoly':
        p, q = self._unify(other)
        terms = dict(p._terms)
        for exponents, coefficient in q._terms.items():
            terms[exponents] = terms.get(exponents, 0.0) + coefficient

        return MultiPoly(p._variables, terms)

    def scale(self, factor: float) -> 'MultiPoly':
        factor = float(factor)
        return MultiPoly(self._variables, {e: c * factor for e, c in self._terms.items()})

    def neg(self) -> 'MultiPoly':
        return MultiPoly(self._variables, {e: -c for e, c in self._terms.items()})

    def sub(self, other: 'MultiPoly') -> 'MultiPoly':
        return self.add(other.neg())

    def mul(self, other: 'MultiPoly') -> 'MultiPoly':
        p, q = self._unify(other)
        terms = dict()
        for e1, c1 in p._terms.items():
            for e2, c2 in q._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0.0) + c1 * c2

        return MultiPoly(p._variables, terms)

    def power(self, k: int) -> 'MultiPoly':
        if k < 0:
            raise ValueError('Only non-negative integer powers are polynomials')

        result = MultiPoly.constant(1.0, self._variables)
        base = self
        # square and multiply
        while k:
            if k & 1:
                result = result.mul(base)
            k >>= 1
            if k:
                base = base.mul(base)

        return result

    def differentiate(self, var: str) -> 'MultiPoly':
        """
        Formal partial derivative with respect to var

        :param var: variable name, must belong to this polynomial's variable set
        :return: MultiPoly over the same variables
        """
        if var not in self._variables:
            raise UnknownVariableException(f'Unknown variable {var}, expected one of {self._variables}')

        i = self._variables.index(var)
        terms = dict()
        for exponents, coefficient in self._terms.items():
            if exponents[i] == 0:
                continue

            lowered = exponents[:i] + (exponents[i] - 1,) + exponents[i + 1:]
            terms[lowered] = coefficient * exponents[i]

        return MultiPoly(self._variables, terms)

    def gradient(self) -> Tuple['MultiPoly', ...]:
        return tuple(self.differentiate(v) for v in self._variables)

    def hessian(self) -> Tuple[Tuple['MultiPoly', ...], ...]:
        return tuple(tuple(g.differentiate(v) for v in self._variables) for g in self.gradient())

    def substitute(self, var: str, replacement: 'MultiPoly') -> 'MultiPoly':
        """
        Replace var by a polynomial. The result lives over the remaining variables plus those of replacement.

        :param var: variable to eliminate
        :param replacement: polynomial substituted for var
        :return: the composed polynomial
        """
        if var not in self._variables:
            raise UnknownVariableException(f'Unknown variable {var}, expected one of {self._variables}')

        i = self._variables.index(var)
        rest = tuple(v for v in self._variables if v != var)
        names = sort_variables(rest + replacement.variables)

        by_power: Dict[int, Dict[Exponents, float]] = dict()
        for exponents, coefficient in self._terms.items():
            reduced = exponents[:i] + exponents[i + 1:]
            by_power.setdefault(exponents[i], dict())[reduced] = coefficient

        replacement = replacement.with_variables(names)
        result = MultiPoly((), dict()).with_variables(names)
        power = MultiPoly.constant(1.0, names)
        for k in range(max(by_power, default=-1) + 1):
            if k > 0:
                power = power.mul(replacement)

            if k in by_power:
                coefficient_poly = MultiPoly(rest, by_power[k]).with_variables(names)
                result = result.add(coefficient_poly.mul(power))

        return result

    def eval(self, x: Union[Sequence[float], Mapping[str, float]]) -> float:
        """
        Evaluate at a point given either as a sequence in variable order or as a name -> value mapping
        """
        point = self._point(x)
        values = [coefficient * math.prod(v ** e for v, e in zip(point, exponents))
                  for exponents, coefficient in self.sorted_terms()]
        return math.fsum(values)

    def __call__(self, x) -> float:
        return self.eval(x)

    def _point(self, x) -> Tuple[float, ...]:
        if isinstance(x, Mapping):
            try:
                return tuple(float(x[v]) for v in self._variables)
            except KeyError as ke:
                raise DimensionMismatchException(f'No value supplied for variable {ke}')

        point = tuple(float(v) for v in np.ravel(x))
        if len(point) != self.nvars:
            raise DimensionMismatchException(f'Expected {self.nvars} values for {self._variables}, got {len(point)}')

        return point

    def eval_many(self, points) -> np.ndarray:
        """
        Vectorized evaluation over an (N, nvars) array, used by grid oracles and plotting

        :param points: array like of shape (N, nvars)
        :return: ndarray of shape (N,)
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.nvars) if self.nvars else pts.reshape(-1, 0)

        if pts.shape[1] != self.nvars:
            raise DimensionMismatchException(f'Expected {self.nvars} columns for {self._variables}')

        result = np.zeros(pts.shape[0])
        for exponents, coefficient in self.sorted_terms():
            monomial = np.full(pts.shape[0], coefficient)
            for i, e in enumerate(exponents):
                if e:
                    monomial = monomial * pts[:, i] ** e
            result += monomial

        return result

    def to_text(self) -> str:
        """
        Canonical text: coeff*var^exp monomials in descending lexicographic exponent order. Coefficients use
        repr so that parse(to_text(p)) reproduces p exactly.
        """
        if not self._terms:
            return '0'

        pieces = list()
        for exponents, coefficient in self.sorted_terms():
            factors = [v if e == 1 else f'{v}^{e}' for v, e in zip(self._variables, exponents) if e]
            body = '*'.join([repr(abs(coefficient))] + factors)
            if not pieces:
                pieces.append(f'-{body}' if coefficient < 0 else body)
            else:
                pieces.append(f'- {body}' if coefficient < 0 else f'+ {body}')

        return ' '.join(pieces)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f'MultiPoly({self._variables!r}, {self.to_text()!r})'

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented

        return self._variables == other._variables and self._terms == other._terms

    def __hash__(self):
        return hash((self._variables, frozenset(self._terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else self.add(other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else self.sub(other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else other.sub(self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)

        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else self.mul(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.neg()

    def __pow__(self, k):
        return self.power(int(k))


def parse(text: str, variables: Iterable[str] = None) -> MultiPoly:
    """
    Parse polynomial text. Accepts the canonical form produced by MultiPoly.to_text as well as factored
    expressions, for example: -2*x1*(x1 - 2*x2) - 2*x2*(3*x1 + 4*x2)

    Decimal literals are read as exact rationals before conversion to float, so canonical text round trips.

    :param text: polynomial expression using + - * ^ ** and parentheses
    :param variables: optional variable set; must contain every identifier used in the text
    :return: MultiPoly
    """
    if text is None or not str(text).strip():
        raise PolyParserError('Empty polynomial text')

    text = str(text).strip()
    names = sort_variables(_IDENTIFIER.findall(text))
    local_dict = {name: sp.Symbol(name) for name in names}

    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=_TRANSFORMATIONS, evaluate=True)
    except Exception as e:
        raise PolyParserError(f'Could not parse polynomial text "{text}": {e}')

    if variables is not None:
        target = sort_variables(variables)
        unknown = [n for n in names if n not in target]
        if unknown:
            raise PolyParserError(f'Polynomial uses unknown variables {unknown}, expected {target}')
    else:
        target = names

    try:
        if not target:
            return MultiPoly.constant(float(sp.Rational(expr)))

        poly = sp.Poly(sp.expand(expr), *[local_dict.get(n, sp.Symbol(n)) for n in target])
        if not poly.domain.is_Exact:
            raise PolyParserError(f'Inexact coefficient domain {poly.domain} in "{text}"')

        terms = {monomial: float(coefficient) for monomial, coefficient in poly.terms()}
    except PolyParserError:
        raise
    except Exception as e:
        raise PolyParserError(f'Not a polynomial in {target}: "{text}" ({e})')

    logger.debug(f'parsed polynomial with {len(terms)} terms over {target}')
    return MultiPoly(target, terms)
