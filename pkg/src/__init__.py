# Package initialization
from . import core
from . import utils

__version__ = "0.1.0"
