"""Python bindings for the DI-QSDC simulator."""

import json

from ._diqsdc import (
    bell_transition,
    bits_for_transition,
    chsh_analytic,
    cli,
    qd_decode,
    run_json,
    selftest,
    tables,
)

__all__ = [
    "bell_transition",
    "bits_for_transition",
    "chsh_analytic",
    "cli",
    "qd_decode",
    "run",
    "run_json",
    "selftest",
    "tables",
]


def run(**kwargs):
    """Run one protocol instance and return the report as a dict."""
    return json.loads(run_json(**kwargs))
