import json
from importlib import resources

import numpy as np
import pytest

from trapzopt.robot_model import JointLimits, default_robot


def _demo(name):
    text = resources.files("trapzopt").joinpath(f"data/demo_{name}.json").read_text()
    return json.loads(text)


@pytest.fixture
def limits():
    return JointLimits.default()


@pytest.fixture(scope="session")
def ur5():
    return default_robot()


@pytest.fixture(params=["a", "b"])
def demo(request):
    return _demo(request.param)


@pytest.fixture
def demo_a():
    return _demo("a")


def random_feasible_va(rng, n):
    """(v, a) pairs with v^2/a spread over (0.01, 1]."""
    v = rng.uniform(0.05, 3.0, n)
    ratio = rng.uniform(0.01, 1.0, n)
    return v, v * v / ratio


def random_waypoints(rng, n_segments):
    q0 = rng.uniform(-2.0, 2.0, 6)
    steps = rng.uniform(-1.0, 1.0, (n_segments, 6))
    return np.vstack([q0, q0 + np.cumsum(steps, axis=0)])


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the verdict follows the test outcome."""
    entry = {"id": request.node.name, "detail": ""}
    _ACCEPTANCE_LINES.append(entry)

    def note(text):
        entry["detail"] = text

    yield note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and "criterion" in item.fixturenames:
        for entry in _ACCEPTANCE_LINES:
            if entry["id"] == item.name:
                entry["passed"] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for e in _ACCEPTANCE_LINES:
        verdict = "PASS" if e.get("passed") else "FAIL"
        terminalreporter.write_line(f"{verdict}  {e['id']}  {e['detail']}")
