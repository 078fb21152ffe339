"""Python access to the prewet simulation and reference library."""

from ._core import (
    FSReference,
    RuntimeFailure,
    ValidationError,
    __version__,
    airy,
    airy_zero,
    critical_beta,
    default_law_chi,
    report,
    run,
    sample_bridges,
    spontaneous_magnetization,
)

__all__ = [
    "FSReference",
    "RuntimeFailure",
    "ValidationError",
    "__version__",
    "airy",
    "airy_zero",
    "critical_beta",
    "default_law_chi",
    "report",
    "run",
    "sample_bridges",
    "spontaneous_magnetization",
]
