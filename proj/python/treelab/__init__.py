"""Branching Markov chains on regular trees, Glauber dynamics and covering thresholds."""

from ._treelab import *  # noqa: F401,F403
from ._treelab import __doc__  # noqa: F401
