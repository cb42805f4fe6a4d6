"""Hamilton-Jacobi toolkit for higher-order Lagrangians.

Commands take a job configuration (a dict with the same fields as the CLI's JSON config)
and return ``(report, exit_code)``; ``simulate`` also returns the trajectory CSV.
"""

import json

from ._hjmech import HjmError, diff, equal_numeric, euler_lagrange, evaluate, simplify
from . import _hjmech

__all__ = [
    "HjmError",
    "corpus_list",
    "corpus_run",
    "derive",
    "diff",
    "equal_numeric",
    "euler_lagrange",
    "evaluate",
    "hj_check",
    "simplify",
    "simulate",
    "solve_affine",
]


def _call(fn, *args):
    report, csv, code = fn(*args)
    return json.loads(report), csv, code


def derive(config):
    report, _, code = _call(_hjmech._derive, json.dumps(config))
    return report, code


def simulate(config):
    return _call(_hjmech._simulate, json.dumps(config))


def hj_check(config):
    report, _, code = _call(_hjmech._hj_check, json.dumps(config))
    return report, code


def solve_affine(config):
    report, _, code = _call(_hjmech._solve_affine, json.dumps(config))
    return report, code


def corpus_list(filter=""):
    report, _, code = _call(_hjmech._corpus_list, filter)
    return report, code


def corpus_run(filter=None, seed=None):
    report, _, code = _call(_hjmech._corpus_run, filter, seed)
    return report, code
