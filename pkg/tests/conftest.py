import os

os.environ.setdefault("SPINNET_DEBUG_CHECKS", "1")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from spinnet import config  # noqa: E402


@pytest.fixture(autouse=True, scope="session")
def _debug_checks():
    previous = config.set_tolerances(debug_checks=True)
    yield
    config.set_tolerances(**previous.__dict__)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def kron_all(*ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out
