"""Longitudinal web-domain link analysis."""

from ._core import *  # noqa: F401,F403
from ._core import ChronoscopeError

ChronoscopeError.code = property(lambda self: self.args[0])

__version__ = "0.1.0"
