"""Nonlocal optimal design solvers.

Discretizes the fractional Gagliardo energy on interval and rectangle grids,
computes hard- and soft-obstacle Poincare constants, optimizes obstacle sets
under a measure constraint via bathtub alternating minimization, and runs the
penalty (sigma -> infinity) and scaling (s -> 1) limit experiments.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
