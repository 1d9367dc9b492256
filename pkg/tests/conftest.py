import numpy as np
import pytest

import penflow as pf


def pytest_configure(config):
    config._acceptance_verdicts = []


@pytest.fixture(scope="session")
def acceptance_verdicts(request):
    """Shared list the acceptance tests append (num, desc, ok, detail) to."""
    return request.config._acceptance_verdicts


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = getattr(config, "_acceptance_verdicts", [])
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(verdicts):
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num} {word}: {desc} [{detail}]")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def ball_pair_problem():
    """Two agents on one edge, l1+linear objectives, big balls."""
    g = pf.NetworkGraph.from_edges(2, [(0, 1)])
    objs = [
        pf.L1PlusLinear(np.array([0.5, -0.2]), np.array([0.1, 0.3])),
        pf.L1PlusLinear(np.array([-0.4, 0.1]), np.array([-0.2, 0.2])),
    ]
    sets = [pf.Ball(np.zeros(2), 3.0), pf.Ball(np.array([0.2, 0.1]), 2.5)]
    return pf.make_problem(objs, sets, g)


@pytest.fixture
def mixed_problem():
    """Three agents on a path, mixed objective and set families."""
    g = pf.NetworkGraph.from_edges(3, [(0, 1), (1, 2)])
    P = np.array([[2.0, 0.3], [0.3, 1.5]])
    objs = [
        pf.L1PlusLinear(np.array([0.3, -0.1]), np.array([0.2, -0.4])),
        pf.QuadPlusL1(P, np.array([0.1, -0.2]), 0.5),
        pf.L1PlusLinear(np.array([-0.2, 0.4]), np.array([0.0, 0.1])),
    ]
    sets = [
        pf.Box(np.array([-1.5, -1.0]), np.array([1.0, 1.5])),
        pf.Ball(np.array([0.1, 0.0]), 2.0),
        pf.Box(np.array([-2.0, -2.0]), np.array([2.0, 2.0])),
    ]
    return pf.make_problem(objs, sets, g)
