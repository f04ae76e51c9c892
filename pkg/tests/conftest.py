"""Shared fixtures: derived default-link parameters and the six scenario
runs (three reference trajectories x two engines) reused across files so the
heavy simulations happen once per session."""

import math

import pytest
from hypothesis import settings

from wptsbar.controller import ControllerConfig
from wptsbar.harness import ScenarioConfig, run_scenario
from wptsbar.model import DEFAULT_PARAMS, derive_params

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

KINDS = ("step", "ramp", "proposed")


@pytest.fixture(scope="session")
def derived():
    return derive_params(DEFAULT_PARAMS)


@pytest.fixture(scope="session")
def env_runs():
    """(record, metrics) per reference trajectory, envelope engine, 20 ms."""
    return {
        kind: run_scenario(ScenarioConfig(controller=ControllerConfig(ref_kind=kind)))
        for kind in KINDS
    }


@pytest.fixture(scope="session")
def sw_runs():
    """(record, metrics) per reference trajectory, switched engine, plus the
    proposed trajectory with the gate shifted by a quarter carrier period."""
    runs = {
        kind: run_scenario(
            ScenarioConfig(controller=ControllerConfig(ref_kind=kind), engine="switched")
        )
        for kind in KINDS
    }
    runs["proposed_quarter"] = run_scenario(
        ScenarioConfig(
            controller=ControllerConfig(ref_kind="proposed"),
            engine="switched",
            phase_offset=math.pi / 2.0,
        )
    )
    return runs
