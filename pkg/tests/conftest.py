import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from engine.exactfield import RATIONAL_FIELD, prime_field  # noqa: E402
from engine.exactlinalg import ExactMatrix  # noqa: E402

settings.register_profile(
    "tdpkit",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("tdpkit")


@pytest.fixture
def QQ():
    return RATIONAL_FIELD


@pytest.fixture
def GF13():
    return prime_field(13)


@pytest.fixture
def worked_pair(QQ):
    """The d = 1 pair A = [[0,0],[1,1]], A* = [[0,1],[0,1]] over QQ."""
    A = ExactMatrix.from_rows(QQ, [[0, 0], [1, 1]])
    Astar = ExactMatrix.from_rows(QQ, [[0, 1], [0, 1]])
    return A, Astar
