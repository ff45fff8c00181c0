"""Simulator and provable security bounds for two-party quantum bit-string
generation over a lossy optical channel.

The package is a thin wrapper over the compiled extension; see the individual
function docstrings for the operations (channel model, protocol execution,
adversary simulation, security bounds, consistency statistics).
"""

from qbsg._core import *  # noqa: F401,F403

__version__ = "1.0.0"
