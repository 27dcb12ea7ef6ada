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
bswitch

bswitch represents switched linear systems as single polynomial systems by Bernstein interpolation of the
switching signal, simulates both forms, builds Lyapunov derivatives and certifies polynomial inequalities
on boxes with interval arithmetic and branch and bound.

This software is provided without support, warranty, or guarantee.
Use at your own risk.
"""

import os

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

PRESETS_FILE = os.path.join(BASE_DIR, 'presets', 'presets.yaml')

# Bernstein interpolation
DEFAULT_DEGREE = 100
DEFAULT_DELTA = 10.0
MAX_SERIES_DEGREE = 1000

# monomial expansion beyond this degree is ill-conditioned, evaluation-only paths ignore it
TO_POLY_MAX_DEGREE = 30

# simulation
DIVERGENCE_THRESHOLD = 1e6
DEFAULT_DT = 1e-3
DEFAULT_T_END = 10.0

# verification
DEFAULT_EPSILON = 0.01
DEFAULT_MAX_DEPTH = 40
DEFAULT_MAX_BOXES = 1000000
DEFAULT_SLACK_FACTOR = 1e-12
DEFAULT_RANDOM_SAMPLES = 16
DEFAULT_RANDOM_SEED = 0

RIGOR_DISCLAIMER = 'numerical: outward slack on every interval operation, no directed rounding, not a formal proof'

# interpolate subcommand
DEFAULT_INTERPOLATE_POINTS = 201

# default Bernstein degree for polynomial B-switched fields, kept under TO_POLY_MAX_DEGREE
DEFAULT_VERIFY_DEGREE = 10
