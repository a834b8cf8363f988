#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception hierarchy for the toy-waves laboratory.

Every error raised on purpose by the package derives from ToyWavesError so
the command line can map it onto an exit code.
"""

from typing import Optional


class ToyWavesError(Exception):
    """Base class for all deliberate failures."""


class InvalidFieldError(ToyWavesError):
    """Non-finite samples or coefficients."""


class AliasingError(ToyWavesError):
    """
    Raised when a transform is asked for fewer than 2K+1 samples.
    """

    def __init__(self, max_wavenumber: int, samples: int):
        self.max_wavenumber = max_wavenumber
        self.samples = samples
        super().__init__(
            f"{samples} samples cannot represent K={max_wavenumber}; "
            f"need at least {2 * max_wavenumber + 1}"
        )


class ParameterError(ToyWavesError, ValueError):
    """
    A parameter violates a geometric or admissibility constraint.

    The message always names the violated inequality.
    """


class UndefinedFunctionError(ToyWavesError, KeyError):
    """An operator expression references a function missing from its environment."""

    def __str__(self):
        return f"undefined function in operator expression: {self.args[0]!r}"


class BlowUpError(ToyWavesError):
    """
    The state became non-finite or exceeded the blow-up norm.

    Attributes:
        time: Simulation time at which the blow-up was detected, if known.
        state: The offending state, if available.
    """

    def __init__(self, message: str, time: Optional[float] = None, state=None):
        self.time = time
        self.state = state
        if time is not None:
            message = f"{message} (t={time:.6g})"
        super().__init__(message)


class ConfigError(ToyWavesError):
    """
    A configuration document could not be turned into a RunConfig.

    Attributes:
        key: The offending key, when there is one.
    """

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class ZeroMeanWarning(UserWarning):
    """The antiderivative dropped a non-zero mean."""
