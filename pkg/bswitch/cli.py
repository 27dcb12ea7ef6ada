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
Batch command line front end

    interpolate   switching signal samples as x,sigma CSV
    simulate      standard or blended trajectory as CSV
    compare       both modes, merged CSV and a summary
    lyapunov      Lie derivative of a quadratic candidate
    verify        certify p(x) < eps on a box
    preset-list   built-in systems

Exit codes: 0 success, 1 Falsified / Inconclusive or computation failure, 2 usage error.
"""

import argparse
import contextlib
import logging
import sys
from typing import List
from typing import Optional

import numpy as np

from bswitch import settings
from bswitch.lib import bernstein
from bswitch.lib import config_utils
from bswitch.lib import lyapunov
from bswitch.lib import output_utils
from bswitch.lib import switched
from bswitch.lib import verifier
from bswitch.lib.exceptions import BSwitchException
from bswitch.lib.exceptions import ConfigParserError
from bswitch.lib.exceptions import PolyParserError
from bswitch.lib.exceptions import ValidationException
from bswitch.lib.exceptions import VerifierConfigException
from bswitch.lib.poly import parse
from bswitch.lib.validators import Finite
from bswitch.lib.validators import PositiveFinite
from bswitch.lib.validators import PositiveInteger
from bswitch.lib.validators import UnitIntervalWindow

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ValidationException, ConfigParserError, PolyParserError, VerifierConfigException)


def configure_logging(verbose: bool) -> logging.Handler:
    root = logging.getLogger()
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root.addHandler(handler)
    return handler


@contextlib.contextmanager
def output_stream(path: Optional[str]):
    if path is None:
        yield sys.stdout
        return

    try:
        with open(path, 'w', newline='') as stream:
            yield stream
    except OSError as oe:
        raise ValidationException(f'Could not write {path}: {oe}')


def _add_system_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', help='built-in system name, see preset-list')
    source.add_argument('--config', help='YAML system file')
    parser.add_argument('--degree', help='Bernstein degree m of blended rules')
    parser.add_argument('--delta', help='state sign scale delta')
    parser.add_argument('--depth', help='composition depth of the sign interpolant, 0 for none')


def _add_simulation_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--x0', help='initial state, comma separated')
    parser.add_argument('--dt', help='integration step')
    parser.add_argument('--t-end', dest='t_end', help='final time')
    parser.add_argument('--output', help='CSV file, stdout when omitted')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='bswitch', description='Bernstein blended switched systems')
    parser.add_argument('--verbose', action='store_true', help='debug logging on stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    interpolate = commands.add_parser('interpolate', help='sample a switching signal interpolant')
    interpolate.add_argument('--kind', choices=('sign', 'pulse'), default='sign')
    interpolate.add_argument('--degree', default=str(settings.DEFAULT_DEGREE))
    interpolate.add_argument('--delta', default='1.0', help='sign: the signal is evaluated at delta * x')
    interpolate.add_argument('--depth', default='0', help='sign: composition depth')
    interpolate.add_argument('--domain', help='lo:hi of the sampled x range')
    interpolate.add_argument('--window', action='append', help='pulse: t0:t1, repeatable, default 0.2:0.4')
    interpolate.add_argument('--points', default=str(settings.DEFAULT_INTERPOLATE_POINTS))
    interpolate.add_argument('--output', help='CSV file, stdout when omitted')

    simulate = commands.add_parser('simulate', help='simulate one mode')
    _add_system_arguments(simulate)
    _add_simulation_arguments(simulate)
    simulate.add_argument('--mode', choices=[m.value for m in switched.SimulationMode],
                          default=switched.SimulationMode.STANDARD.value)

    compare = commands.add_parser('compare', help='simulate both modes and compare')
    _add_system_arguments(compare)
    _add_simulation_arguments(compare)

    lyap = commands.add_parser('lyapunov', help='Lie derivative of x^T P x')
    _add_system_arguments(lyap)
    lyap.add_argument('--P', dest='P', help='symmetric matrix "a b; c d", identity by default')
    lyap.add_argument('--subsystem', default='1', help='subsystem index, 1 based')
    lyap.add_argument('--bswitched', action='store_true', help='use the polynomial B-switched field')
    lyap.add_argument('--output', help='polynomial file for verify --poly-file')

    verify = commands.add_parser('verify', help='certify p(x) < eps on a box')
    poly_source = verify.add_mutually_exclusive_group(required=True)
    poly_source.add_argument('--poly', help='polynomial text')
    poly_source.add_argument('--poly-file', dest='poly_file', help='file holding the polynomial text')
    verify.add_argument('--bound', action='append', required=True, help='var:lo:hi, one per variable')
    verify.add_argument('--eps', default=repr(settings.DEFAULT_EPSILON))
    verify.add_argument('--max-depth', dest='max_depth', default=str(settings.DEFAULT_MAX_DEPTH))
    verify.add_argument('--max-boxes', dest='max_boxes', default=str(settings.DEFAULT_MAX_BOXES))
    verify.add_argument('--no-monotonicity', dest='monotonicity', action='store_false')
    verify.add_argument('--certificate', help='certificate file')

    commands.add_parser('preset-list', help='list built-in systems')
    return parser


def load_system(args) -> config_utils.SystemConfig:
    if args.preset:
        return config_utils.get_preset(args.preset)

    return config_utils.load_system_config(args.config)


def _optional(validator, value):
    return None if value is None else validator(value)


def build_system(args, config: config_utils.SystemConfig, degree=None) -> switched.SwitchedSystem:
    degree = _optional(PositiveInteger('degree', maximum=settings.MAX_SERIES_DEGREE), args.degree) or degree
    delta = _optional(PositiveFinite('delta'), args.delta)
    depth = _optional(PositiveInteger('depth', minimum=0), args.depth)
    return config.switched_system(degree=degree, delta=delta, depth=depth)


def simulation_parameters(args, config: config_utils.SystemConfig, system: switched.SwitchedSystem):
    block = config.simulation
    x0_value = args.x0 if args.x0 is not None else block.get('x0')
    if x0_value is None:
        raise ValidationException('x0 is required, pass --x0 or set simulation.x0')

    x0 = config_utils.parse_vector(x0_value, 'x0')
    if len(x0) != system.n:
        raise ValidationException(f'x0 has {len(x0)} entries, the system has {system.n} states')

    dt = PositiveFinite('dt')(args.dt if args.dt is not None else block.get('dt', settings.DEFAULT_DT))
    default_t_end = 1.0 if system.rule.time_based else settings.DEFAULT_T_END
    t_end = PositiveFinite('t_end')(args.t_end if args.t_end is not None else block.get('t_end', default_t_end))
    if system.rule.time_based and t_end > 1.0:
        raise ValidationException(f'time pulse rules are defined on [0, 1], t_end={t_end}')

    return x0, dt, t_end


def _parse_range(text: str, name: str):
    pieces = text.split(':')
    if len(pieces) != 2:
        raise ValidationException(f'{name} "{text}" must look like lo:hi')

    lo, hi = Finite(name)(pieces[0]), Finite(name)(pieces[1])
    if not lo < hi:
        raise ValidationException(f'{name} "{text}" needs lo < hi')

    return lo, hi


def cmd_interpolate(args) -> int:
    m = PositiveInteger('degree', maximum=settings.MAX_SERIES_DEGREE)(args.degree)
    points = PositiveInteger('points', minimum=2)(args.points)

    if args.kind == 'sign':
        delta = PositiveFinite('delta')(args.delta)
        depth = PositiveInteger('depth', minimum=0)(args.depth)
        lo, hi = _parse_range(args.domain, 'domain') if args.domain else (-1.0, 1.0)
        weight = bernstein.sign_interpolant(m, delta, depth)
        xs = np.linspace(lo, hi, points)
        values = [weight.of_product(delta * x) for x in xs]
    else:
        windows = [UnitIntervalWindow('window')(_parse_range(w, 'window')) for w in (args.window or ['0.2:0.4'])]
        lo, hi = _parse_range(args.domain, 'domain') if args.domain else (0.0, 1.0)
        series = bernstein.window_interpolant(m, windows)
        xs = np.linspace(lo, hi, points)
        values = series.evaluate_many(xs)

    with output_stream(args.output) as stream:
        output_utils.write_signal(stream, xs, values)

    return EXIT_OK


def cmd_simulate(args) -> int:
    config = load_system(args)
    system = build_system(args, config)
    x0, dt, t_end = simulation_parameters(args, config, system)

    trajectory = switched.simulate(system, x0, t_end, dt, mode=args.mode)
    with output_stream(args.output) as stream:
        output_utils.write_trajectories(stream, [trajectory])

    if args.output:
        print(output_utils.render_key_values([
            ('status', trajectory.status.value),
            ('final_time', output_utils.number(trajectory.final_time)),
            ('final_norm', output_utils.number(np.linalg.norm(trajectory.final_state))),
        ]), end='')

    return EXIT_OK


def cmd_compare(args) -> int:
    config = load_system(args)
    system = build_system(args, config)
    x0, dt, t_end = simulation_parameters(args, config, system)

    standard = switched.simulate(system, x0, t_end, dt, mode=switched.SimulationMode.STANDARD)
    blended = switched.simulate(system, x0, t_end, dt, mode=switched.SimulationMode.BLENDED)

    with output_stream(args.output) as stream:
        output_utils.write_trajectories(stream, [standard, blended])

    print(output_utils.render_key_values([
        ('sup_norm_gap', output_utils.number(switched.sup_norm_gap(standard, blended))),
        ('diverged_standard', str(standard.diverged).lower()),
        ('diverged_blended', str(blended.diverged).lower()),
    ]), end='')
    return EXIT_OK


def cmd_lyapunov(args) -> int:
    config = load_system(args)

    if args.bswitched:
        system = build_system(args, config, degree=settings.DEFAULT_VERIFY_DEGREE)
        field = lyapunov.vector_field_bswitched(system)
    else:
        index = PositiveInteger('subsystem')(args.subsystem)
        if index > len(config.matrices):
            raise ValidationException(f'{config.name} has {len(config.matrices)} subsystems, got --subsystem {index}')
        field = lyapunov.vector_field_from_linear(config.matrices[index - 1])

    P = config_utils.parse_matrix(args.P, 'P') if args.P else np.eye(field.n)
    if P.shape != (field.n, field.n):
        raise ValidationException(f'P must be {field.n}x{field.n}, got {P.shape[0]}x{P.shape[1]}')

    try:
        candidate = lyapunov.quadratic_candidate(P)
    except BSwitchException as be:
        raise ValidationException(f'P: {be}')

    if not lyapunov.is_positive_definite(P):
        logger.warning('P is not positive definite, x^T P x is not a Lyapunov candidate')

    derivative = lyapunov.lie_derivative(candidate, field)
    text = derivative.to_text()
    print(text)

    if args.output:
        with output_stream(args.output) as stream:
            stream.write(output_utils.render_polynomial(derivative.variables, text))

    return EXIT_OK


def read_polynomial_file(path: str) -> str:
    try:
        with open(path, 'r') as poly_file:
            lines = [line.strip() for line in poly_file]
    except OSError as oe:
        raise ValidationException(f'Could not read {path}: {oe}')

    text = ' '.join(line for line in lines if line and not line.startswith('#'))
    if not text:
        raise ValidationException(f'{path} holds no polynomial')

    return text


def cmd_verify(args) -> int:
    text = args.poly if args.poly is not None else read_polynomial_file(args.poly_file)
    p = parse(text)

    bounds = dict()
    for bound in args.bound:
        name, lo, hi = config_utils.parse_bound(bound)
        if name in bounds:
            raise ValidationException(f'Variable {name} is bounded twice')
        bounds[name] = (lo, hi)

    missing = [v for v in p.used_variables() if v not in bounds]
    if missing:
        raise ValidationException(f'No --bound given for {", ".join(missing)}')

    cfg = verifier.VerifyConfig(epsilon=Finite('eps')(args.eps),
                                max_depth=PositiveInteger('max-depth')(args.max_depth),
                                max_boxes=PositiveInteger('max-boxes')(args.max_boxes),
                                use_monotonicity=args.monotonicity)
    certificate = verifier.verify_ineq(p, verifier.Box.from_bounds(bounds), cfg)

    if args.certificate:
        with output_stream(args.certificate) as stream:
            stream.write(certificate.to_text())

    summary = [('status', certificate.status.value)]
    if certificate.falsified:
        summary.append(('witness', ','.join(output_utils.number(v) for v in certificate.witness)))
        summary.append(('value', output_utils.number(certificate.value)))
    if certificate.reason:
        summary.append(('reason', certificate.reason))
    summary.extend([('boxes_processed', certificate.boxes_processed),
                    ('max_depth_reached', certificate.max_depth_reached)])
    print(output_utils.render_key_values(summary), end='')
    print(f'# elapsed={certificate.elapsed:.6f} (non-deterministic)')

    return EXIT_OK if certificate.verified else EXIT_FAILED


def cmd_preset_list(args) -> int:
    for preset in config_utils.list_presets():
        print(output_utils.render_preset(preset.name, preset.description, preset.matrices), end='')

    return EXIT_OK


COMMANDS = {
    'interpolate': cmd_interpolate,
    'simulate': cmd_simulate,
    'compare': cmd_compare,
    'lyapunov': cmd_lyapunov,
    'verify': cmd_verify,
    'preset-list': cmd_preset_list,
}


def run(argv: List[str] = None) -> int:
    """
    Parse argv and run one subcommand

    :param argv: arguments without the program name
    :return: exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as se:
        return se.code if isinstance(se.code, int) else EXIT_USAGE

    handler = configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as ue:
        print(f'bswitch: error: {ue}', file=sys.stderr)
        return EXIT_USAGE
    except BSwitchException as be:
        print(f'bswitch: {args.command} failed: {be}', file=sys.stderr)
        return EXIT_FAILED
    finally:
        logging.getLogger().removeHandler(handler)
