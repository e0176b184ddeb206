"""Modified 6j-symbols for sl(2) at odd roots of unity and the associated
state-sum invariant of links in 3-manifolds."""

from .qarith import TRUNCATED, UNROLLED, RootData

__version__ = "0.1.0"

__all__ = ["RootData", "UNROLLED", "TRUNCATED", "__version__"]
