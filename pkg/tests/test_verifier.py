import time

import numpy as np
import pytest

from bswitch import settings
from bswitch.lib import output_utils
from bswitch.lib import verifier
from bswitch.lib.exceptions import ConfigParserError
from bswitch.lib.exceptions import DimensionMismatchException
from bswitch.lib.exceptions import VerifierConfigException
from bswitch.lib.poly import MultiPoly
from bswitch.lib.poly import parse
from bswitch.lib.poly import state_variables
from bswitch.lib.verifier import Box
from bswitch.lib.verifier import CertificateStatus
from bswitch.lib.verifier import Interval
from bswitch.lib.verifier import VerifyConfig
from conftest import random_poly_terms

LIE_DERIVATIVE = '-2*x1^2 - 2*x1*x2 - 8*x2^2'


def unit_square():
    return Box.from_bounds({'x1': (0.0, 1.0), 'x2': (0.0, 1.0)})


def random_box(rng, n=2, radius=1.0):
    bounds = dict()
    for i in range(1, n + 1):
        lo, hi = sorted(rng.uniform(-radius, radius, size=2))
        bounds[f'x{i}'] = (float(lo), float(hi))
    return Box.from_bounds(bounds)


def test_interval_operations():
    a = Interval(-1.0, 2.0)
    b = Interval(3.0, 4.0)
    assert (a + b).contains(1.0 + 3.0)
    assert (a + b).lo == pytest.approx(2.0)
    assert (a * b).lo == pytest.approx(-4.0)
    assert (a * b).hi == pytest.approx(8.0)
    assert a.scale(-2.0).lo == pytest.approx(-4.0)
    assert -1e-9 <= a.power(2).lo <= 0.0
    assert a.power(2).hi == pytest.approx(4.0)
    assert a.power(3).lo == pytest.approx(-1.0)
    assert Interval(-3.0, -2.0).power(2).lo == pytest.approx(4.0)
    assert a.power(0) == Interval(1.0, 1.0)


def test_interval_rejects_empty():
    with pytest.raises(DimensionMismatchException):
        Interval(1.0, 0.0)


def test_interval_eval_examples():
    box = Box.from_bounds({'x1': (0.0, 1.0)})
    bound = verifier.interval_eval(parse('x1'), box)
    assert -1e-9 <= bound.lo <= 0.0
    assert bound.hi == pytest.approx(1.0)

    # the natural extension is wider than the true range [-0.25, 0]
    bound = verifier.interval_eval(parse('x1^2 - x1'), box)
    assert bound.lo <= -0.25
    assert bound.hi >= 0.0

    bound = verifier.interval_eval(parse(LIE_DERIVATIVE), unit_square())
    assert bound.hi >= 0.0
    assert bound.lo <= -12.0


def test_interval_eval_rejects_uncovered_variables():
    with pytest.raises(DimensionMismatchException):
        verifier.interval_eval(parse('x3'), unit_square())


def test_taylor_bound_examples():
    box = Box.from_bounds({'x1': (-1.0, 1.0)})
    assert verifier.taylor_upper_bound(parse('3'), box) == pytest.approx(3.0, abs=1e-9)
    assert verifier.taylor_upper_bound(parse('x1^2'), box) == pytest.approx(1.0, abs=1e-9)
    assert verifier.taylor_upper_bound(parse('x1'), Box.from_bounds({'x1': (0.0, 2.0)})) == pytest.approx(2.0, abs=1e-9)


def test_taylor_bound_is_exact_for_affine(rng):
    for _ in range(50):
        coefficients = rng.uniform(-3.0, 3.0, size=3)
        p = MultiPoly(('x1', 'x2'), {(0, 0): coefficients[0], (1, 0): coefficients[1], (0, 1): coefficients[2]})
        box = random_box(rng)
        corners = [(a, b) for a in (box['x1'].lo, box['x1'].hi) for b in (box['x2'].lo, box['x2'].hi)]
        exact = max(p.eval(c) for c in corners)
        assert verifier.taylor_upper_bound(p, box) == pytest.approx(exact, rel=1e-9, abs=1e-9)


def test_bounds_contain_point_values(rng):
    for _ in range(1000):
        p = MultiPoly(('x1', 'x2'), random_poly_terms(rng, 2))
        box = random_box(rng)
        point = tuple(box.sample(rng, 1)[0])
        value = p.eval(point)
        bound = verifier.interval_eval(p, box)
        assert bound.lo - 1e-9 <= value <= bound.hi + 1e-9
        assert verifier.taylor_upper_bound(p, box) >= value - 1e-9


def test_interval_eval_shrinks_on_children(rng):
    for _ in range(200):
        p = MultiPoly(('x1', 'x2'), random_poly_terms(rng, 2))
        box = random_box(rng)
        parent = verifier.interval_eval(p, box)
        for child in box.bisect(box.widest_dimension()):
            bound = verifier.interval_eval(p, child)
            assert bound.lo >= parent.lo - 1e-9
            assert bound.hi <= parent.hi + 1e-9



def test_bounds_contain_point_values_up_to_three_variables(rng):
    for _ in range(300):
        n = int(rng.integers(1, 4))
        p = MultiPoly(state_variables(n), random_poly_terms(rng, n))
        box = random_box(rng, n, radius=2.0)
        bound = verifier.interval_eval(p, box)
        upper = verifier.taylor_upper_bound(p, box)
        for point in box.sample(rng, 20):
            value = p.eval(tuple(point))
            assert bound.lo - 1e-9 <= value <= bound.hi + 1e-9
            assert upper >= value - 1e-9


def test_taylor_bound_shrinks_on_children(rng):
    for _ in range(200):
        n = int(rng.integers(1, 4))
        p = MultiPoly(state_variables(n), random_poly_terms(rng, n))
        box = random_box(rng, n, radius=2.0)
        parent = verifier.taylor_upper_bound(p, box)
        for child in box.bisect(box.widest_dimension()):
            assert verifier.taylor_upper_bound(p, child) <= parent + 1e-9 * (1.0 + abs(parent))


def test_taylor_bound_slack_covers_cancellation():
    # center value and gradient term cancel, the outward slack scales with their magnitudes
    p = parse('100000000*x1 - 100000000')
    bound = verifier.taylor_upper_bound(p, Box.from_bounds({'x1': (0.0, 1.0)}))
    assert bound >= p.eval((1.0,))
    assert bound >= 0.5 * settings.DEFAULT_SLACK_FACTOR * 1e8


def test_box_orders_dimensions_naturally():
    box = Box.from_bounds({'x10': (0.0, 1.0), 'x2': (0.0, 2.0)})
    assert box.names == ('x2', 'x10')
    assert box['x2'] == Interval(0.0, 2.0)
    assert box.widest_dimension() == 0


def test_box_widest_dimension_tie_takes_lowest_index():
    assert unit_square().widest_dimension() == 0
    assert Box.from_bounds({'x1': (0.0, 1.0), 'x2': (0.0, 3.0)}).widest_dimension() == 1


def test_box_text():
    box = Box.from_text('x2:-1:1, x1:0:0.5')
    assert box.names == ('x1', 'x2')
    assert box.to_text() == 'x1:0.0:0.5,x2:-1.0:1.0'
    assert Box.from_text(box.to_text()) == box


def test_box_rejects_duplicates():
    with pytest.raises(DimensionMismatchException):
        Box(('x1', 'x1'), (Interval(0.0, 1.0), Interval(0.0, 1.0)))


def test_box_bisect():
    left, right = unit_square().bisect(0)
    assert left['x1'] == Interval(0.0, 0.5)
    assert right['x1'] == Interval(0.5, 1.0)
    assert left['x2'] == Interval(0.0, 1.0)


@pytest.mark.parametrize('kwargs', [
    {'epsilon': float('nan')},
    {'max_depth': 0},
    {'max_boxes': 0},
    {'max_boxes': True},
    {'slack_factor': 0.0},
    {'random_samples': -1},
    {'seed': -1},
])
def test_verify_config_rejects(kwargs):
    with pytest.raises(VerifierConfigException):
        VerifyConfig(**kwargs)


def test_verify_config_threshold():
    assert VerifyConfig(epsilon=0.01).threshold == pytest.approx(0.01 - settings.DEFAULT_SLACK_FACTOR)
    assert VerifyConfig(epsilon=100.0).threshold < 100.0


def test_verify_lie_derivative():
    started = time.perf_counter()
    certificate = verifier.verify_ineq(parse(LIE_DERIVATIVE), unit_square(), VerifyConfig(epsilon=0.01))
    assert time.perf_counter() - started < 1.0
    assert certificate.status is CertificateStatus.VERIFIED
    assert certificate.verified
    assert certificate.witness is None
    assert certificate.unresolved_boxes == 0


def test_verify_negative_constant():
    certificate = verifier.verify_ineq(parse('-1'), Box.from_bounds({'x1': (0.0, 1.0)}), VerifyConfig(epsilon=0.0))
    assert certificate.verified
    assert certificate.boxes_processed == 1
    assert certificate.pass_interval == 1


def test_falsified_at_center():
    cfg = VerifyConfig(epsilon=0.5, use_monotonicity=False)
    certificate = verifier.verify_ineq(parse('x1'), unit_square(), cfg)
    assert certificate.falsified
    assert certificate.witness == (0.5, 0.5)
    assert certificate.value == 0.5


def test_falsified_on_monotone_face():
    certificate = verifier.verify_ineq(parse('x1'), unit_square(), VerifyConfig(epsilon=0.5))
    assert certificate.falsified
    assert certificate.witness == (1.0, 0.5)
    assert certificate.pass_mono == 1


def test_boundary_supremum_needs_monotonicity():
    box = Box.from_bounds({'x1': (0.0, 1.0)})

    certificate = verifier.verify_ineq(parse('x1'), box, VerifyConfig(epsilon=1.0, max_depth=5, use_monotonicity=False))
    assert certificate.status is CertificateStatus.INCONCLUSIVE
    assert certificate.reason == 'max_depth'
    assert certificate.max_depth_reached == 5
    assert certificate.unresolved_boxes == 1

    certificate = verifier.verify_ineq(parse('x1'), box, VerifyConfig(epsilon=1.0, max_depth=5))
    assert certificate.falsified
    assert certificate.witness == (1.0,)


def test_box_budget():
    cfg = VerifyConfig(epsilon=1.0, max_boxes=3, use_monotonicity=False)
    certificate = verifier.verify_ineq(parse('x1'), Box.from_bounds({'x1': (0.0, 1.0)}), cfg)
    assert certificate.status is CertificateStatus.INCONCLUSIVE
    assert certificate.reason == 'max_boxes'
    assert certificate.boxes_processed == 3
    assert certificate.unresolved_boxes == 2


def test_random_pass_finds_interior_counterexample():
    # the maximum sits off every bisection midpoint, only sampling reaches above epsilon
    p = parse('-(x1 - 0.3)^2')
    box = Box.from_bounds({'x1': (0.0, 1.0)})
    cfg = VerifyConfig(epsilon=-1e-3, max_depth=1, use_monotonicity=False, random_samples=200)
    certificate = verifier.verify_ineq(p, box, cfg)
    assert certificate.falsified
    assert p.eval(certificate.witness) >= cfg.epsilon


def test_certificate_text_round_trip():
    for p, cfg in ((parse(LIE_DERIVATIVE), VerifyConfig(epsilon=0.01)),
                   (parse('x1'), VerifyConfig(epsilon=0.5, use_monotonicity=False))):
        certificate = verifier.verify_ineq(p, unit_square(), cfg)
        text = certificate.to_text()
        assert 'elapsed' not in text
        assert f'status={certificate.status.value}\n' in text
        assert f'rigor={settings.RIGOR_DISCLAIMER}\n' in text
        assert verifier.Certificate.from_text(text) == certificate



def test_certificate_text_is_key_value_render():
    certificate = verifier.verify_ineq(parse(LIE_DERIVATIVE), unit_square(), VerifyConfig(epsilon=0.01))
    assert certificate.to_text() == output_utils.render_key_values(certificate.fields())
    assert output_utils.render_key_values([('status', 'Verified'), ('boxes', '3')]) == 'status=Verified\nboxes=3\n'


def test_certificate_text_is_deterministic():
    first = verifier.verify_ineq(parse(LIE_DERIVATIVE), unit_square(), VerifyConfig(epsilon=0.01))
    second = verifier.verify_ineq(parse(LIE_DERIVATIVE), unit_square(), VerifyConfig(epsilon=0.01))
    assert first.to_text() == second.to_text()


def test_certificate_missing_field():
    certificate = verifier.verify_ineq(parse(LIE_DERIVATIVE), unit_square(), VerifyConfig(epsilon=0.01))
    text = '\n'.join(line for line in certificate.to_text().split('\n') if not line.startswith('status='))
    with pytest.raises(ConfigParserError):
        verifier.Certificate.from_text(text)


@pytest.mark.slow
def test_verifier_against_grid_oracle(rng):
    grid = np.array([(a, b) for a in np.linspace(-1.0, 1.0, 101) for b in np.linspace(-1.0, 1.0, 101)])
    box = Box.from_bounds({'x1': (-1.0, 1.0), 'x2': (-1.0, 1.0)})
    for _ in range(100):
        p = MultiPoly(('x1', 'x2'), random_poly_terms(rng, 2, max_degree=3))
        values = p.eval_many(grid)
        gmax, spread = float(values.max()), float(values.max() - values.min())

        certificate = verifier.verify_ineq(p, box, VerifyConfig(epsilon=gmax + 0.2 * spread + 1e-3, max_boxes=20000))
        assert certificate.verified

        epsilon = gmax - 0.2 * spread
        certificate = verifier.verify_ineq(p, box, VerifyConfig(epsilon=epsilon, max_boxes=20000))
        assert not certificate.verified
        if certificate.falsified:
            assert p.eval(certificate.witness) >= epsilon


@pytest.mark.slow
def test_verifier_never_certifies_grid_maximum(rng):
    grids = {1: 201, 2: 41, 3: 15}
    for _ in range(60):
        n = int(rng.integers(1, 4))
        names = state_variables(n)
        p = MultiPoly(names, random_poly_terms(rng, n, max_degree=3))
        box = Box.from_bounds({name: (-2.0, 2.0) for name in names})
        axes = np.meshgrid(*([np.linspace(-2.0, 2.0, grids[n])] * n), indexing='ij')
        epsilon = float(p.eval_many(np.stack([a.ravel() for a in axes], axis=1)).max())

        certificate = verifier.verify_ineq(p, box, VerifyConfig(epsilon=epsilon, max_boxes=2000))
        assert certificate.status is not CertificateStatus.VERIFIED
        if certificate.falsified:
            assert p.eval(certificate.witness) >= epsilon
