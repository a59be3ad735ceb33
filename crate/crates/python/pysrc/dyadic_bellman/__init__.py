"""Sharp Bellman functions for dyadic maximal operators."""

from ._dyadic_bellman import *  # noqa: F401,F403
from ._dyadic_bellman import BellmanResult, DomainError, NumericalError  # noqa: F401
