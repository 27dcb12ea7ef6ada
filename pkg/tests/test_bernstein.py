import math

import numpy as np
import pytest

from bswitch.lib import bernstein
from bswitch.lib.exceptions import BernsteinDomainException
from bswitch.lib.exceptions import ExpansionLimitException
from bswitch.lib.exceptions import NonFiniteSampleException
from bswitch.lib.poly import MultiPoly

GRID = np.linspace(0.0, 1.0, 101)


@pytest.mark.parametrize('m', [1, 5, 100])
def test_basis_endpoint(m):
    assert bernstein.basis(m, 0, 0.0) == 1.0
    assert bernstein.basis(m, m, 1.0) == 1.0


def test_basis_value():
    assert bernstein.basis(2, 1, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_basis_sums_to_one():
    total = math.fsum(bernstein.basis(100, r, 0.37) for r in range(101))
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('m', [1, 5, 10, 50, 100, 200])
def test_partition_of_unity(m):
    for t in GRID:
        values = bernstein.basis_vector(m, t)
        assert np.all(values >= 0.0)
        assert abs(math.fsum(values) - 1.0) <= 1e-12


@pytest.mark.parametrize('r, t', [(-1, 0.5), (3, 0.5), (1, -0.1), (1, 1.5)])
def test_basis_domain_errors(r, t):
    with pytest.raises(BernsteinDomainException):
        bernstein.basis(2, r, t)


def test_constant_series():
    s = bernstein.series_from_function(lambda x: 0.3, 40, (-2.0, 3.0))
    for x in np.linspace(-2.0, 3.0, 17):
        assert s.evaluate(x) == 0.3


@pytest.mark.parametrize('m', [5, 50, 100])
def test_square_closed_form(m):
    s = bernstein.series_from_function(lambda t: t * t, m)
    errors = [abs(s.evaluate(t) - (t * t + t * (1 - t) / m)) for t in GRID]
    assert max(errors) <= 1e-10


@pytest.mark.parametrize('m', [1, 17, 100, 200])
def test_affine_reproduction(m):
    s = bernstein.series_from_function(lambda t: 0.25 - 1.5 * t, m)
    for t in GRID:
        assert s.evaluate(t) == pytest.approx(0.25 - 1.5 * t, abs=1e-10)


def test_identity_series_value():
    s = bernstein.series_from_function(lambda t: t, 17)
    assert bernstein.eval_series(s, 0.3) == pytest.approx(0.3, abs=1e-12)


def test_endpoint_interpolation():
    s = bernstein.series_from_function(lambda x: math.cos(x), 30, (-1.0, 2.0))
    assert s.evaluate(-1.0) == s.samples[0]
    assert s.evaluate(2.0) == s.samples[-1]


def test_clamping():
    s = bernstein.step_series(100)
    assert s.evaluate(-5.0) == 0.0
    assert s.evaluate(5.0) == 1.0


def test_step_series_midpoint_and_monotone():
    s = bernstein.step_series(100)
    assert s.samples[50] == 0.5
    assert s.evaluate(0.0) == pytest.approx(0.5, abs=1e-12)
    values = s.evaluate_many(np.linspace(-1.0, 1.0, 1000))
    assert np.all(np.diff(values) >= -1e-12)


def test_range_preservation(rng):
    samples = rng.uniform(0.0, 1.0, size=61)
    s = bernstein.BernsteinSeries(samples, (0.0, 2.0))
    values = s.evaluate_many(np.linspace(-1.0, 3.0, 400))
    assert np.all(values >= 0.0)
    assert np.all(values <= 1.0)


@pytest.mark.parametrize('m', [10, 100, 200])
def test_nested_matches_casteljau(rng, m):
    s = bernstein.BernsteinSeries(rng.uniform(-1.0, 1.0, size=m + 1))
    for t in GRID:
        assert s.evaluate(t, method='nested') == pytest.approx(s.evaluate(t), abs=1e-12)


def test_evaluate_many_matches_scalar():
    s = bernstein.step_series(50)
    xs = np.linspace(-1.2, 1.2, 33)
    many = s.evaluate_many(xs)
    for x, v in zip(xs, many):
        assert v == pytest.approx(s.evaluate(x), abs=1e-15)


def test_unknown_method():
    with pytest.raises(BernsteinDomainException):
        bernstein.step_series(5).evaluate(0.1, method='horner')


def test_non_finite_sample_names_node():
    with pytest.raises(NonFiniteSampleException, match='r=3'):
        bernstein.series_from_function(lambda x: math.inf if x > 0.5 else 0.0, 4)


@pytest.mark.parametrize('m', [0, 1001])
def test_degree_limits(m):
    with pytest.raises(BernsteinDomainException):
        bernstein.step_series(m)


def test_compose_near_identity():
    s = bernstein.step_series(40)
    identity = bernstein.series_from_function(lambda t: t, 30)
    composed = bernstein.compose(identity, s)
    for x in np.linspace(-1.0, 1.0, 21):
        assert composed.evaluate(x) == pytest.approx(s.evaluate(x), abs=1e-12)


def test_compose_step_midpoint():
    composed = bernstein.compose(bernstein.step_series(100, (0.0, 1.0)), bernstein.step_series(100))
    assert composed.evaluate(0.0) == pytest.approx(0.5, abs=1e-12)


def test_compose_sharpens():
    single = bernstein.step_series(100)
    composed = bernstein.compose(bernstein.step_series(100, (0.0, 1.0)), single)
    assert abs(composed.evaluate(0.2) - 1.0) < abs(single.evaluate(0.2) - 1.0)
    assert abs(composed.evaluate(-0.2)) < abs(single.evaluate(-0.2))


def test_sign_interpolant_examples():
    w = bernstein.sign_interpolant(100, 10.0)
    assert w(0.0, 3.0) == pytest.approx(0.5, abs=1e-12)
    assert w(1.0, 1.0) > 1.0 - 1e-3
    assert w(1.0, -1.0) < 1e-3


def test_sign_interpolant_negative_orientation():
    positive = bernstein.sign_interpolant(100, 10.0)
    negative = bernstein.sign_interpolant(100, 10.0, active_when='negative')
    assert negative(1.0, -1.0) > 1.0 - 1e-3
    assert negative(1.0, 1.0) < 1e-3
    for x1, x2 in ((0.03, 0.5), (-0.02, 0.7), (0.0, 2.0)):
        assert negative(x1, x2) == pytest.approx(1.0 - positive(x1, x2), abs=1e-12)

    with pytest.raises(BernsteinDomainException):
        bernstein.sign_interpolant(100, 10.0, active_when='sometimes')


def test_sign_interpolant_depth():
    plain = bernstein.sign_interpolant(100, 1.0)
    sharper = bernstein.sign_interpolant(100, 1.0, depth=2)
    assert sharper(0.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    assert sharper(0.3, 1.0) > plain(0.3, 1.0)


def test_weight_pair_validity():
    w = bernstein.sign_interpolant(100, 10.0)
    for x1 in np.linspace(-2.0, 2.0, 41):
        for x2 in np.linspace(-2.0, 2.0, 41):
            first, second = w.pair(x1, x2)
            assert 0.0 <= first <= 1.0
            assert 0.0 <= second <= 1.0
            assert first + second == pytest.approx(1.0, abs=1e-15)


def test_pulse_examples():
    pulse = bernstein.pulse_interpolant(100, 0.2, 0.4)
    assert pulse.evaluate(0.3) > 0.5
    assert pulse.evaluate(0.0) == 0.0
    assert pulse.evaluate(0.9) < 1e-3


@pytest.mark.parametrize('m', [1, 10, 100])
def test_full_pulse_is_one(m):
    pulse = bernstein.pulse_interpolant(m, 0.0, 1.0)
    for t in GRID:
        assert pulse.evaluate(t) == 1.0


def test_pulse_requires_ordered_window():
    with pytest.raises(BernsteinDomainException):
        bernstein.pulse_interpolant(10, 0.4, 0.2)


def test_merge_windows():
    assert bernstein.merge_windows([(0.4, 0.6), (0.2, 0.4), (0.8, 0.9)]) == [(0.2, 0.6), (0.8, 0.9)]


def test_to_poly_constant():
    s = bernstein.BernsteinSeries([0.7] * 6)
    assert bernstein.to_poly(s) == MultiPoly.constant(0.7, ('t',))


def test_to_poly_identity():
    p = bernstein.to_poly(bernstein.series_from_function(lambda t: t, 3))
    assert p.coefficient((1,)) == pytest.approx(1.0, abs=1e-15)
    for k in (0, 2, 3):
        assert abs(p.coefficient((k,))) < 1e-15


@pytest.mark.parametrize('s', [
    bernstein.series_from_function(math.exp, 30),
    bernstein.series_from_function(lambda t: math.sin(3 * t), 20),
    bernstein.step_series(10, (0.0, 1.0)),
])
def test_to_poly_round_trip(s):
    p = bernstein.to_poly(s)
    for t in np.linspace(0.0, 1.0, 1000):
        assert abs(p.eval((t,)) - s.evaluate(t)) < 1e-8


def test_to_poly_limit():
    with pytest.raises(ExpansionLimitException):
        bernstein.to_poly(bernstein.step_series(31))
