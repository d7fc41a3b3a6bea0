import math
import os
from pathlib import Path

import numpy as np
import pytest

import tchedge

CONFIGS = Path(os.environ.get("TCHEDGE_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


def small(name, paths=2000):
    config = tchedge.load_config(str(CONFIGS / name))
    config.paths = paths
    return config


def test_brownian_char_function_is_gaussian():
    value = tchedge.brownian_char_function(1.5, 0.8)
    assert value.imag == 0.0
    assert value.real == pytest.approx(math.exp(-0.5 * 1.5**2 * 0.8), rel=1e-14)


def test_eta_char_function_single_mark():
    c, cum, z, nu = 0.7, 1.3, 1.0, 0.5
    expected = np.exp(cum * nu * (np.exp(1j * c * z) - 1 - 1j * c * z))
    assert tchedge.eta_char_function(c, cum, [z], [nu]) == pytest.approx(expected, rel=1e-14)


def test_market_price_of_risk_cancels_drift():
    s = tchedge.market_price_of_risk(0.02, 0.06, 0.2, [-0.05, -0.1], 1.1, 0.9, [1.0, 2.0], [0.5, 0.25])
    assert abs(s["residual"]) <= 1e-12
    assert s["theta_B"] < 0


def test_simulate_shapes():
    config = small("default.yaml", 500)
    paths = tchedge.simulate(config)
    assert paths["s1"].shape == (500, config.steps + 1)
    assert paths["dB"].shape == (500, config.steps)
    assert len(paths["counts"]) == 2
    assert np.all(np.diff(paths["cum_B"], axis=1) >= 0)


def test_hedge_terminal_value_matches_claim():
    result = tchedge.hedge(small("complete_market.yaml"))
    assert np.array_equal(result["y"][:, -1], result["claim"])
    assert result["max_drift_residual"] <= 1e-10
    assert 5.0 < result["v"] < 15.0


def test_run_is_deterministic(tmp_path):
    config = small("clock_claim.yaml", 1000)
    config.output = str(tmp_path / "a")
    first = tchedge.run(config, "hedge")
    config.output = str(tmp_path / "b")
    second = tchedge.run(config, "hedge")
    assert first["v"] == second["v"]
    assert (tmp_path / "a" / "hedge_nodes.csv").read_bytes() == (tmp_path / "b" / "hedge_nodes.csv").read_bytes()


def test_config_errors_are_value_errors():
    with pytest.raises(tchedge.ConfigError):
        tchedge.parse_config("grid:\n  steps: 8\n  stepz: 9\n")
    with pytest.raises(ValueError):
        tchedge.parse_config("grid: [")


def test_config_round_trip():
    config = small("default.yaml")
    again = tchedge.parse_config(config.serialize())
    assert again.serialize() == config.serialize()
    assert again.hash() == config.hash()
