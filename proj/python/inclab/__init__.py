"""Inclusion process simulation, generator checks and limiting diffusions."""

from ._inclab import *  # noqa: F401,F403
from ._inclab import __doc__  # noqa: F401

__version__ = "0.1.0"
