# Core module initialization
from .errors import (
    AliasingError,
    BlowUpError,
    ConfigError,
    InvalidFieldError,
    ParameterError,
    ToyWavesError,
    UndefinedFunctionError,
    ZeroMeanWarning,
)
from .spectral_field import MultiplierSpec, SpectralField
from .model import CutoffChi, ModelParams, build_cutoff, uniform_cutoff
from .commutator_lab import CommutatorReport, SuiteParams, ratio_suite
from .integrator import Integrator, StepperConfig, TrajectoryRecord, lifespan_probe

__all__ = [
    'AliasingError',
    'BlowUpError',
    'ConfigError',
    'InvalidFieldError',
    'ParameterError',
    'ToyWavesError',
    'UndefinedFunctionError',
    'ZeroMeanWarning',
    'MultiplierSpec',
    'SpectralField',
    'CutoffChi',
    'ModelParams',
    'build_cutoff',
    'uniform_cutoff',
    'CommutatorReport',
    'SuiteParams',
    'ratio_suite',
    'Integrator',
    'StepperConfig',
    'TrajectoryRecord',
    'lifespan_probe',
]
