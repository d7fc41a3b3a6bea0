"""Worst-case hedging under time-changed noise."""

import json

from ._tchedge import (
    Config,
    ConfigError,
    Error,
    brownian_char_function,
    eta_char_function,
    hedge,
    load_config,
    market_price_of_risk,
    parse_config,
    simulate,
)
from ._tchedge import _run

__all__ = [
    "Config",
    "ConfigError",
    "Error",
    "brownian_char_function",
    "eta_char_function",
    "hedge",
    "load_config",
    "market_price_of_risk",
    "parse_config",
    "run",
    "simulate",
]


def run(config, command, sweep=1):
    """Run a CLI command in process and return its JSON summary as a dict."""
    return json.loads(_run(config, command, sweep))
