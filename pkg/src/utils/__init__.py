# Utils module initialization
from .config import RunConfig, emit_config, load_config, parse_config
from .experiments import EXPERIMENTS, run, sweep

__all__ = [
    'RunConfig',
    'emit_config',
    'load_config',
    'parse_config',
    'EXPERIMENTS',
    'run',
    'sweep',
]
