"""Numerical checks for Lorentzian splitting machinery.

Thin wrapper over the compiled extension: charts, time separation, Busemann
limits, and the scenario runners. Reports cross the boundary as JSON and are
decoded to plain dicts here.
"""

import json as _json

from ._core import (
    Chart,
    ConfigError,
    LorlabError,
    builtin_charts,
    busemann_limit,
    default_scenario_text,
    ell,
    rti_check,
    run_text,
)

__all__ = [
    "Chart",
    "ConfigError",
    "LorlabError",
    "builtin_charts",
    "busemann_limit",
    "default_scenario",
    "ell",
    "rti_check",
    "run",
]


def default_scenario(chart="minkowski2d"):
    """Default scenario for a chart, as a dict."""
    return _json.loads(default_scenario_text(chart))


def run(command, scenario=None, **overrides):
    """Run one subcommand and return the report as a dict.

    `command` is one of "timesep", "busemann", "comparison", "bochner",
    "split". `scenario` is a scenario dict (defaults are derived from the
    chart when omitted); keyword overrides are applied on top, e.g.
    run("timesep", chart="product2d", samples=20, seed=7).
    """
    if scenario is None:
        scenario = default_scenario(overrides.get("chart", "minkowski2d"))
    scenario = dict(scenario)
    scenario.update(overrides)
    return _json.loads(run_text(command, _json.dumps(scenario)))
