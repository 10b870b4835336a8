"""Exact computations on finite charts of weighted CAT(0) cube complexes."""

__version__ = "0.1.0"

from .core import ChartError, ComplexChart, Halfspace, make_chart, validate  # noqa: E402
from .median import gate, hull, interval, median  # noqa: E402
from .crossratio import cross_ratio, crt, gromov_product, is_opposite  # noqa: E402

__all__ = [
    "ChartError",
    "ComplexChart",
    "Halfspace",
    "make_chart",
    "validate",
    "median",
    "interval",
    "hull",
    "gate",
    "cross_ratio",
    "crt",
    "gromov_product",
    "is_opposite",
    "__version__",
]
