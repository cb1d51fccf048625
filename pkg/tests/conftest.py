import hypothesis
import numpy as np
import pytest

from app.domain.entities import Dimension, OptimizerConfig
from app.domain.qudit import MagicKind, magic_state

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.load_profile("fast")


@pytest.fixture
def qutrit():
    return Dimension(d=3)


@pytest.fixture
def strange(qutrit):
    return magic_state(MagicKind.STRANGE, qutrit)


@pytest.fixture
def norrell(qutrit):
    return magic_state(MagicKind.NORRELL, qutrit)


@pytest.fixture
def quick_search():
    """Frame search settings small enough for unit tests."""
    return OptimizerConfig(restarts=2, max_iterations=60, seed=1)
