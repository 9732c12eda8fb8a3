import numpy as np
import pytest
from hypothesis import strategies as st

from fwmav import quatmath as qm


def random_unit_quats(rng, n):
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vectors = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def unit_quaternions(draw):
    comps = draw(st.tuples(finite, finite, finite, finite))
    q = np.array(comps)
    n = np.linalg.norm(q)
    if n < 1e-3:
        return qm.IDENTITY.copy()
    return q / n


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
