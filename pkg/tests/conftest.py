import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest

from jumps.jumpLaw import buildJumpLaw


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical or quadrature-heavy test")


@pytest.fixture(scope="session")
def law15():
    return buildJumpLaw(1.5)


@pytest.fixture(scope="session")
def smallLaw():
    return buildJumpLaw(1.5, 2**12)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(12345)))
