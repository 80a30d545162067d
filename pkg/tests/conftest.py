import math

import numpy as np
import pytest

from tpsbvp.config import bundled
from tpsbvp.model import BoundaryFunction, ProblemSpec

ACCEPTANCE_LINES = []

D2 = 2.0 * 3.0 * math.exp(-2.0 / 3.0) / 3.0


def example(i):
    """(problem, lambda) for the bundled example i."""
    cfg = bundled(f"ex{i}")
    return cfg.problem(), cfg.resolve_lambda()


@pytest.fixture(scope="session")
def examples():
    return {i: example(i) for i in (1, 2, 3, 4)}


def constant_problem(alpha, delta, eta, f, m=0.0, u=0.0, v=0.0, b=0.0):
    C = BoundaryFunction.constant
    return ProblemSpec(alpha, delta, eta, f, C(u), C(v), m, b)


def zero_field(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def start_mid(p, grid):
    from tpsbvp.model import GridFunction

    return GridFunction(grid, 0.5 * (p.upper0.value(grid) + p.lower0.value(grid)) * np.ones_like(grid))


def self_convergence(p, sizes=(256, 512, 1024)):
    """Distances d_n = max |y_n - y_2n| over the coarse nodes, for n in sizes."""
    from tpsbvp.model import make_grid
    from tpsbvp.oracle import FdConfig, fd_solve

    sols = {}
    for n in sorted(set(sizes) | {2 * n for n in sizes}):
        g = make_grid(n, p.eta)
        sols[n] = fd_solve(p, FdConfig(n=n), start_mid(p, g))
    out = []
    for n in sizes:
        c, f = sols[n], sols[2 * n]
        idx = np.searchsorted(f.nodes, c.nodes)
        assert np.array_equal(f.nodes[idx], c.nodes)
        out.append(float(np.max(np.abs(c.values - f.values[idx]))))
    return out


@pytest.fixture(scope="session")
def solved():
    """Enclosure report and oracle per bundled example on the n = 1024 mesh."""
    from tpsbvp.iterate import solve_enclosure
    from tpsbvp.model import make_grid
    from tpsbvp.oracle import FdConfig, fd_solve

    out = {}
    for i in (1, 2, 3, 4):
        p, lam = example(i)
        g = make_grid(1024, p.eta)
        out[i] = (p, solve_enclosure(p, lam, 1e-8, 200, g), fd_solve(p, FdConfig(n=1024), start_mid(p, g)))
    return out
