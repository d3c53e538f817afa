"""Invariant-subspace solutions of time-fractional PDEs.

Thin wrapper over the compiled core: the example catalog, the run/verify
pipeline, problem checking, and the special functions.
"""

import json as _json

try:
    from ._invsub import (
        InvsubError,
        check_problem,
        examples,
        gamma,
        mittag_leffler,
        run,
        selftest,
        solution,
    )
except ImportError:  # in-tree runs put the extension on sys.path directly
    from _invsub import (
        InvsubError,
        check_problem,
        examples,
        gamma,
        mittag_leffler,
        run,
        selftest,
        solution,
    )


def run_report(id, **kwargs):
    """Like run(), but returns the verification report as a dict."""
    return _json.loads(run(id, **kwargs))


__all__ = [
    "InvsubError",
    "check_problem",
    "examples",
    "gamma",
    "mittag_leffler",
    "run",
    "run_report",
    "selftest",
    "solution",
]
