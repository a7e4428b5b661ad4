import math

import numpy as np
import pytest
from hypothesis import strategies as st

from nonlocality.states import Direction

thetas = st.floats(0.0, math.pi, allow_nan=False)
phis = st.floats(-10.0, 10.0, allow_nan=False)
directions = st.builds(Direction, thetas, phis)
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, text = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}")
