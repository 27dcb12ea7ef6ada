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

import math

from bswitch.lib.exceptions import ValidationException


class Finite:
    """
    Checks that value converts to a finite float and returns it
    """

    def __init__(self, name='value'):
        self.name = name

    def __call__(self, value) -> float:
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ValidationException(f'{self.name}: "{value}" is not a number')

        if not math.isfinite(number):
            raise ValidationException(f'{self.name}: {value} is not finite')

        return number

    def __eq__(self, other):
        return (
            isinstance(other, self.__class__) and self.name == other.name
        )


class PositiveFinite(Finite):
    """
    Checks for a finite float strictly greater than zero
    """

    def __call__(self, value) -> float:
        number = super().__call__(value)
        if number <= 0:
            raise ValidationException(f'{self.name}: {value} must be positive')

        return number


class PositiveInteger(Finite):
    """
    Checks for an integer >= minimum, 1 by default, and <= maximum when one is given
    """

    def __init__(self, name='value', minimum=1, maximum=None):
        super().__init__(name)
        self.minimum = minimum
        self.maximum = maximum

    def __call__(self, value) -> int:
        number = super().__call__(value)
        if number != int(number):
            raise ValidationException(f'{self.name}: {value} is not an integer')

        if int(number) < self.minimum:
            raise ValidationException(f'{self.name}: {value} must be at least {self.minimum}')

        if self.maximum is not None and int(number) > self.maximum:
            raise ValidationException(f'{self.name}: {value} must be at most {self.maximum}')

        return int(number)


class UnitIntervalWindow:
    """
    Checks a (t0, t1) pair with 0 <= t0 < t1 <= 1
    """

    def __init__(self, name='window'):
        self.name = name

    def __call__(self, value) -> tuple:
        try:
            t0, t1 = (Finite(self.name)(v) for v in value)
        except (TypeError, ValueError):
            raise ValidationException(f'{self.name}: {value} is not a (start, end) pair')

        if not 0.0 <= t0 < t1 <= 1.0:
            raise ValidationException(f'{self.name}: [{t0}, {t1}] must satisfy 0 <= start < end <= 1')

        return t0, t1

    def __eq__(self, other):
        return (
            isinstance(other, UnitIntervalWindow)
        )
