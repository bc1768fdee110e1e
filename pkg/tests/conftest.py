import json

import pytest
from hypothesis import strategies as st

from gserre.rho_calculus import TailedFunction


def build(increments, slope):
    values = [0]
    for step in increments:
        values.append(values[-1] + step)
    return TailedFunction(tuple(values), slope)


@st.composite
def wprime_functions(draw, max_horizon=10):
    incs = draw(st.lists(st.integers(0, 1), max_size=max_horizon))
    return build(incs, draw(st.integers(0, 1)))


@st.composite
def w_functions(draw, max_horizon=10):
    incs = draw(st.lists(st.integers(0, 1), max_size=max(0, max_horizon - 2)))
    return build([1, 1] + incs, draw(st.integers(0, 1)))


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


# criterion number -> (passed, summary); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, text = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}")
