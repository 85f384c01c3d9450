import json
import logging

import numpy as np
import pytest

from ris_kit.schemas.scenario import ScenarioConfig
from ris_kit.services.scenario_service import ScenarioService


SMALL_CONFIG = {
    "M": 4,
    "N": 4,
    "K": 2,
    "delta": 1.0,
    "epsilon": [2.0, 3.0],
    "alpha": [1.0, 1.0],
    "beta": 1.0,
    "gamma": [0.5, 0.8],
    "p_watt": 1.0,
    "sigma2_watt": 1.0,
    "seed": 7,
}


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch):
    """Keep test runs from writing logs/ris_kit.log and drop handlers the CLI installs"""
    monkeypatch.setattr("ris_kit.utils.logging_config.LOG_DIR", "")
    root = logging.getLogger()
    before = list(root.handlers)
    yield
    for handler in list(root.handlers):
        if handler not in before:
            root.removeHandler(handler)


@pytest.fixture
def make_config():
    def factory(**overrides) -> ScenarioConfig:
        data = dict(SMALL_CONFIG)
        data.update(overrides)
        return ScenarioConfig(**data)

    return factory


@pytest.fixture
def make_scenario(make_config):
    def factory(seed=None, **overrides):
        return ScenarioService.build_scenario(make_config(**overrides), seed=seed)

    return factory


@pytest.fixture
def small_scenario(make_scenario):
    return make_scenario()


@pytest.fixture
def default_scenario():
    return ScenarioService.build_scenario(ScenarioService.default_config(seed=0))


@pytest.fixture
def write_config(tmp_path):
    """Dump a config dict to a JSON file and return its path"""
    def writer(data=None, name="scenario.json", **overrides) -> str:
        payload = dict(SMALL_CONFIG if data is None else data)
        payload.update(overrides)
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return writer


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
