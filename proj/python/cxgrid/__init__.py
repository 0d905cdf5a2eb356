"""Runge-Kutta integration along complex time grids."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
