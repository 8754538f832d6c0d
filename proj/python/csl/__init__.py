"""Python front end for the csl toolkit.

``execute`` runs a command in memory and returns the parsed report together
with the artifact bytes; ``run`` behaves like the command-line tool.
"""

import json as _json

from . import _core
from ._core import (
    CslError,
    attacker_success_probability,
    benford_chi2,
    catch_up_probability,
    diff_in_diff,
    fit_garch,
    gini,
    half_life,
    hill_exponent,
    min_confirmations,
    real_payment_burden,
    simulate_attack_alpha,
    simulate_garch,
    suspicious_volume_fraction,
)

__all__ = [
    "CslError",
    "attacker_success_probability",
    "benford_chi2",
    "catch_up_probability",
    "commands",
    "diff_in_diff",
    "execute",
    "fit_garch",
    "gini",
    "half_life",
    "hill_exponent",
    "min_confirmations",
    "real_payment_burden",
    "run",
    "simulate_attack_alpha",
    "simulate_garch",
    "suspicious_volume_fraction",
]


def _scenario_text(scenario):
    if scenario is None:
        return ""
    if isinstance(scenario, str):
        return scenario
    return _json.dumps(scenario)


def commands():
    return list(_core.commands())


def execute(command, scenario=None, data=(), seed=None):
    """Returns (report dict, {artifact name: bytes})."""
    text, files = _core.execute(command, _scenario_text(scenario), [str(p) for p in data], seed)
    return _json.loads(text), dict(files)


def run(command, scenario=None, data=(), seed=None, out_dir=".", format="json"):
    """Returns (exit code, stdout text, stderr text)."""
    return _core.run(command, _scenario_text(scenario), [str(p) for p in data], seed, str(out_dir), format)
