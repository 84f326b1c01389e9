"""Citation-network impact scoring.

Quantifies paper impact on a citation graph whose edges are weighted by
the geographic distance between the citing and cited institutions, whose
nodes can be split by citation context when chains show memory beyond one
step, and whose scores come from a two-register quantum walk (classical
PageRank is included for comparison).
"""

from .errors import CitewalkError, ConvergenceError, DataError, NumericError

__version__ = "0.1.0"

__all__ = [
    "CitewalkError",
    "ConvergenceError",
    "DataError",
    "NumericError",
    "__version__",
]
