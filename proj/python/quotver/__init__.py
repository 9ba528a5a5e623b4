"""Exact verification of quotient singularity constructions."""

from ._core import (
    Chart,
    InputError,
    ParseError,
    Report,
    Step,
    charts,
    equivalent_types,
    explain,
    reid_tai,
    reid_tai_pair,
    summary,
    verify,
)

__all__ = [
    "Chart",
    "InputError",
    "ParseError",
    "Report",
    "Step",
    "charts",
    "equivalent_types",
    "explain",
    "reid_tai",
    "reid_tai_pair",
    "summary",
    "verify",
]
