import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rlxlate.cli import ap_spec, diamond_base, pa_spec, standard_universe
from rlxlate.core import FrameworkSpec, Universe
from rlxlate.policies import (
    Agent,
    Environment,
    deterministic_agent_corpus,
    deterministic_environment_corpus,
)


@pytest.fixture(scope="session")
def u3() -> Universe:
    # two zero-reward percepts and one unit-reward percept
    return standard_universe()


@pytest.fixture(scope="session")
def u2() -> Universe:
    return Universe.make(actions=("a0", "a1"), percepts=("n", "r"),
                         rewards={"n": 0, "r": 1})


@pytest.fixture(scope="session")
def ap4(u3) -> FrameworkSpec:
    return ap_spec(2, 4)


@pytest.fixture(scope="session")
def pa5(u3) -> FrameworkSpec:
    return pa_spec(2, 5)


@pytest.fixture(scope="session")
def base_f() -> FrameworkSpec:
    return diamond_base(2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260816)


def rebadge_agents(spec: FrameworkSpec, agents):
    return [Agent(spec, a.table, a.default, name=a.name) for a in agents]


def rebadge_envs(spec: FrameworkSpec, envs):
    return [Environment(spec, e.table, e.default, name=e.name) for e in envs]


def law_corpora(translation, agent_depth=2, env_depth=1):
    """Deterministic source agents and destination environments, re-badged
    into the translation's (possibly randomized) specs."""
    agents = deterministic_agent_corpus(
        replace(translation.source_spec, deterministic_agents=True), agent_depth)
    envs = deterministic_environment_corpus(
        replace(translation.dest_spec, deterministic_environments=True), env_depth)
    return (rebadge_agents(translation.source_spec, agents),
            rebadge_envs(translation.dest_spec, envs))


@pytest.fixture(scope="session")
def frac():
    return Fraction
