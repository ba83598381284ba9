import itertools

import numpy as np
import pytest

from paretomine.core import Front, Solution

_counter = itertools.count()


def sol(*objectives, params=None, run=None):
    """Solution with the given objectives and (by default) a unique parameter."""
    if params is None:
        params = (float(next(_counter)),)
    return Solution(tuple(params), tuple(objectives), run=run)


def front(*points, run=None):
    members = tuple(sol(*p, run=run) for p in points)
    n = len(points[0]) if points else 2
    return Front(members, n)


def objective_set(f):
    return sorted(tuple(s.objectives) for s in f.members)


def brute_dominates(a, b):
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def random_front(rng, size, n=2, low=0.0, high=10.0, run=None):
    """Mutually non-dominated random front (brute-force filtered)."""
    pts = rng.uniform(low, high, size=(size, n))
    keep = [p for p in pts if not any(brute_dominates(q, p) for q in pts)]
    return Front(tuple(sol(*p, run=run) for p in keep), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def check(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        lines.append((number, line))
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
