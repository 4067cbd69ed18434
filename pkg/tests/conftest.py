"""Independent brute-force oracles shared by the test modules."""

import math

import pytest

# f = [0->1, 1->2, 2->3, 3->1, 4->5, 5->6, 6->2, 7->0]
EIGHT_NODE = (1, 2, 3, 1, 5, 6, 2, 0)


def walk_rho(f, x):
    """(tail, cycle) by remembering the step at which each node was first seen."""
    seen = {}
    step = 0
    while x not in seen:
        seen[x] = step
        x = f(x)
        step += 1
    return seen[x], step - seen[x]


def brute_graph(table):
    """Per-node (tail, cycle) for an explicit table, via walk_rho on every node."""
    return [walk_rho(table.__getitem__, x) for x in range(len(table))]


def naive_trajectory(f, x, steps):
    out = [x]
    for _ in range(steps):
        x = f(x)
        out.append(x)
    return out


def log2_factorial_between(ell, lo, hi):
    """lo < log2((2^ell)!) < hi, checked on the exact integer."""
    fact = math.factorial(1 << ell)
    return fact > (1 << lo) and fact < (1 << hi)


@pytest.fixture
def eight_node():
    return EIGHT_NODE


_acceptance_lines = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_acceptance_lines, [])

    def check(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_acceptance_lines, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
