"""Probability bracket engine: bracket/Bayes algebra, Markov evolution in the
Schrodinger and Heisenberg pictures, and the pbn-1 query language."""

from ._pbn import *  # noqa: F401,F403
from ._pbn import PbnError, __doc__  # noqa: F401
