"""Bursting gene expression: exact jump-process simulation, adiabatic
reduction limits, and density-level verification.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._burstpdmp import (
    ConfigError,
    NumericError,
    default_config,
    flow,
    law_pdf,
    run,
    selfcheck,
    stationary_moments,
    version,
)

__version__ = version()

__all__ = [
    "ConfigError",
    "NumericError",
    "default_config",
    "flow",
    "law_pdf",
    "run",
    "selfcheck",
    "stationary_moments",
    "version",
    "__version__",
]
