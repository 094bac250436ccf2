"""Dynamic (k, p)-clustering with low recourse, and a fractional k-median value estimator."""

from .errors import DynKClustError
from .metric import WeightedMetricSpace

__version__ = "0.1.0"

__all__ = ["DynKClustError", "WeightedMetricSpace", "__version__"]
