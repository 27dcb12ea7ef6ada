import pytest

from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import PolyParserError
from bswitch.lib.exceptions import UnknownVariableException
from bswitch.lib.poly import MultiPoly
from bswitch.lib.poly import parse
from bswitch.lib.poly import sort_variables
from conftest import random_poly_terms

EQ16 = '-2*x1*(x1 - 2*x2) - 2*x2*(3*x1 + 4*x2)'


def test_eval_examples():
    assert MultiPoly.constant(1.0, ('x1', 'x2')).eval((3, 7)) == 1.0
    assert parse('x1^2 + x2^2').eval((0, 0)) == 0.0
    assert parse('-2*x1^2 - 2*x1*x2 - 8*x2^2').eval((1, 1)) == -12.0


def test_eval_accepts_mapping():
    assert parse('x1 + 2*x2').eval({'x1': 1.0, 'x2': 3.0}) == 7.0


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatchException):
        parse('x1 + x2').eval((1.0,))


def test_ring_examples():
    x1 = MultiPoly.variable('x1')
    assert x1.add(x1.neg()).is_zero()
    assert (x1 + 1).mul(x1 - 1) == parse('x1^2 - 1')
    assert parse('x1^2 + x2^2').scale(2).eval((1, 2)) == 10.0


def test_unify_by_name():
    p = parse('x1') + parse('t^2')
    assert p.variables == ('t', 'x1')
    assert p.eval({'t': 2.0, 'x1': 1.0}) == 5.0


def test_differentiate_examples():
    assert parse('x1^2*x2').differentiate('x1') == parse('2*x1*x2')
    assert parse('x1^2', ('x1', 'x2')).differentiate('x2').is_zero()
    assert parse('-2*x1^2 - 2*x1*x2 - 8*x2^2').differentiate('x1') == parse('-4*x1 - 2*x2')


def test_differentiate_unknown_variable():
    with pytest.raises(UnknownVariableException):
        parse('x1^2').differentiate('x3')


def test_zero_coefficients_pruned():
    p = MultiPoly(('x1',), {(1,): 0.0, (0,): 2.0})
    assert dict(p.terms) == {(0,): 2.0}


def test_natural_variable_order():
    assert sort_variables(['x10', 'x2', 'x1']) == ('x1', 'x2', 'x10')


def test_parse_factored_form():
    assert parse(EQ16) == parse('-2*x1^2 - 2*x1*x2 - 8*x2^2')


def test_canonical_text():
    p = parse(EQ16)
    assert p.to_text() == '-2.0*x1^2 - 2.0*x1*x2 - 8.0*x2^2'
    assert MultiPoly.constant(0.0).to_text() == '0'


def test_text_round_trip(rng):
    for _ in range(20):
        p = MultiPoly(('x1', 'x2', 'x3'), random_poly_terms(rng, 3))
        q = parse(p.to_text(), p.variables)
        assert q == p


def test_text_round_trip_small_coefficients():
    p = MultiPoly(('x1',), {(1,): 1e-05, (0,): -2.5e-17})
    assert parse(p.to_text()) == p


@pytest.mark.parametrize('text', ['x1/x2', 'x1 +* 2', '', 'x1^0.5'])
def test_parse_rejects(text):
    with pytest.raises(PolyParserError):
        parse(text)


def test_parse_unknown_variable():
    with pytest.raises(PolyParserError):
        parse('x1 + y', ('x1',))


def test_substitute():
    p = parse('t^2 + 1')
    q = p.substitute('t', parse('x1 + x2'))
    assert q == parse('x1^2 + 2*x1*x2 + x2^2 + 1')


def test_power_and_degree():
    p = parse('x1 + x2').power(3)
    assert p.degree() == 3
    assert p.eval((1, 1)) == 8.0
    assert MultiPoly.constant(0.0).degree() == -1


def test_eval_many_matches_eval(rng):
    p = MultiPoly(('x1', 'x2'), random_poly_terms(rng, 2))
    points = rng.uniform(-2, 2, size=(50, 2))
    values = p.eval_many(points)
    for point, value in zip(points, values):
        assert value == pytest.approx(p.eval(point), rel=1e-12, abs=1e-12)


def test_add_and_mul_properties(rng):
    for _ in range(50):
        p = MultiPoly(('x1', 'x2', 'x3'), random_poly_terms(rng, 3))
        q = MultiPoly(('x1', 'x2', 'x3'), random_poly_terms(rng, 3))
        x = rng.uniform(-2, 2, size=3)
        assert p.add(q).eval(x) == pytest.approx(p.eval(x) + q.eval(x), rel=1e-12, abs=1e-12)
        assert p.mul(q).eval(x) == pytest.approx(p.eval(x) * q.eval(x), rel=1e-10, abs=1e-10)


def test_derivative_matches_finite_differences(rng):
    h = 1e-5
    for _ in range(20):
        p = MultiPoly(('x1', 'x2'), random_poly_terms(rng, 2))
        x = rng.uniform(-1, 1, size=2)
        for i, v in enumerate(p.variables):
            step = [0.0, 0.0]
            step[i] = h
            forward = p.eval(x + step)
            backward = p.eval(x - step)
            assert (forward - backward) / (2 * h) == pytest.approx(p.differentiate(v).eval(x), rel=1e-6, abs=1e-6)


def test_mixed_partials_commute(rng):
    for _ in range(20):
        p = MultiPoly(('x1', 'x2', 'x3'), random_poly_terms(rng, 3, integer=True))
        assert p.differentiate('x1').differentiate('x3') == p.differentiate('x3').differentiate('x1')


def test_gradient_and_hessian():
    p = parse('x1^2*x2 + x2^3')
    assert p.gradient() == (parse('2*x1*x2'), parse('x1^2 + 3*x2^2'))
    hessian = p.hessian()
    assert hessian[0][1] == hessian[1][0] == parse('2*x1', ('x1', 'x2'))
