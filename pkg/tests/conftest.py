"""Shared fixtures: the octagon rep, its principal lift, a bent lift and flag tables"""
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent.parent))

from leafmap.config import RunConfig
from leafmap.frenet import build_flag_table
from leafmap.group import COMMUTATOR_CURVE, bend, fuchsian_octagon_rep, lift_principal

settings.register_profile("leafmap", derandomize=True, deadline=None, max_examples=50)
settings.load_profile("leafmap")

SEED = 20240611
TRIALS = 100


@pytest.fixture(scope="session")
def rep2():
    return fuchsian_octagon_rep()


@pytest.fixture(scope="session")
def rep4(rep2):
    return lift_principal(rep2)


@pytest.fixture(scope="session")
def bent_rep(rep4):
    return bend(rep4, COMMUTATOR_CURVE, (1.0, 0.0, 0.0, -1.0), 0.1)


@pytest.fixture(scope="session")
def table2(rep4, rep2):
    return build_flag_table(rep4, rep2, 2)


@pytest.fixture(scope="session")
def table3(rep4, rep2):
    return build_flag_table(rep4, rep2, 3)


@pytest.fixture(scope="session")
def bent_table(bent_rep, rep2):
    return build_flag_table(bent_rep, rep2, 3)


@pytest.fixture
def run_config(tmp_path):
    """Config writing everything under tmp_path"""
    return RunConfig(rep_path=str(tmp_path / "rep.json"), output_dir=str(tmp_path / "out"),
                     max_word_len=3, leaf_samples=32, leaf_count=3,
                     general_position_trials=20)
