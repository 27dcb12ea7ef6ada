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

# This module holds custom exceptions for bswitch


class BSwitchException(Exception):
    pass


class DimensionMismatchException(BSwitchException):
    pass


class UnknownVariableException(BSwitchException):
    pass


class PolyParserError(BSwitchException):
    pass


class BernsteinDomainException(BSwitchException):
    pass


class NonFiniteSampleException(BernsteinDomainException):
    pass


class ExpansionLimitException(BSwitchException):
    pass


class SwitchingRuleException(BSwitchException):
    pass


class NoActiveSubsystemException(SwitchingRuleException):
    pass


class SimulationException(BSwitchException):

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class LyapunovCandidateException(BSwitchException):
    pass


class VerifierConfigException(BSwitchException):
    pass


class ValidationException(BSwitchException):
    pass


class ConfigParserError(BSwitchException):
    pass


class PresetNotFoundException(ConfigParserError):
    pass
