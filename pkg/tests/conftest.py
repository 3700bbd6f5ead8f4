from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path
from typing import List

import pytest
from loguru import logger

from leveler.plant.sensor import NOISELESS
from leveler.sim.scenario import Scenario, load_scenario

EXAMPLE_DIR = Path(__file__).resolve().parent.parent / "example"
SCENARIO_DIR = EXAMPLE_DIR / "scenarios"


@pytest.fixture(autouse=True)
def reset_logger():
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def warnings() -> List[str]:
    messages: List[str] = []
    handler_id = logger.add(lambda m: messages.append(str(m)), level="WARNING", format="{message}")
    yield messages
    logger.remove(handler_id)


@pytest.fixture
def example_dir() -> Path:
    return EXAMPLE_DIR


@pytest.fixture
def ramp10() -> Scenario:
    return load_scenario(SCENARIO_DIR / "ramp10.json")


@pytest.fixture
def quiet_ramp10(ramp10: Scenario) -> Scenario:
    return replace(ramp10, noise=NOISELESS)


@pytest.fixture
def quiet_ramp25() -> Scenario:
    return load_scenario(SCENARIO_DIR / "ramp25_saturation.json")


@pytest.fixture
def flat() -> Scenario:
    return load_scenario(SCENARIO_DIR / "flat.json")
