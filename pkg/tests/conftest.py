import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from depthalign import SceneConfig, SparsifierConfig, get_profile


@pytest.fixture
def void_profile():
    return get_profile("void")


@pytest.fixture
def tartanair_profile():
    return get_profile("tartanair")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_scene():
    from depthalign import synth_scene

    return synth_scene(SceneConfig(width=96, height=96, seed=11))


@pytest.fixture
def sparsifier_150():
    return SparsifierConfig(target_count=150, seed=5)
