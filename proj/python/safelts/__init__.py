"""Simulator for stochastic linear bandits under stage-wise safety constraints.

Thin re-export of the compiled core; see the project README for the CLI and
file formats.
"""

from safelts._core import *  # noqa: F401,F403
from safelts._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
