"""Python access to the antifragile planning core."""

import json

from ._afp import (
    BudgetExhausted,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario_text,
    open_scenario,
    plan,
)
from . import _afp

__all__ = [
    "BudgetExhausted",
    "Scenario",
    "ScenarioParseError",
    "ScenarioValidationError",
    "classify",
    "load_scenario_text",
    "metrics",
    "open_scenario",
    "plan",
    "run",
]


def classify(scenario, actions="visible"):
    """System verdict at the scenario's initial state, as a dict."""
    return json.loads(_afp.classify_json(scenario, actions))


def run(scenario, seed=None, max_missions=16):
    """Plays the mission game; returns the trace as a list of event dicts."""
    text = _afp.run_ndjson(scenario, seed, max_missions)
    return [json.loads(line) for line in text.splitlines() if line]


def metrics(trace, bound=10):
    """Metrics report for a trace given as event dicts or NDJSON text."""
    if not isinstance(trace, str):
        trace = "".join(json.dumps(e) + "\n" for e in trace)
    return json.loads(_afp.metrics_json(trace, bound))
