import itertools
import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from crncert.network import family_network, parse_network, tail_network

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GAMMA2 = [[0, 1], [-1, -1], [1, -1]]
GAMMA3 = [[0, 0, 1], [0, 1, -1], [-1, -1, 0], [1, 0, -1]]
GAMMA4 = [[0, 0, 0, 1], [0, 0, 1, -1], [0, 1, -1, 0], [-1, -1, 0, 0], [1, 0, 0, -1]]
GAMMA_TAIL = [[0, 0, 2], [0, 1, -1], [-1, -1, 0], [1, -1, 0]]

LAMBDA3 = [
    [0, 0, 0, 0, 1, 1, 1, 1],
    [0, 0, 1, 1, -1, -1, 0, 0],
    [1, 0, 0, -1, 1, 0, 0, -1],
    [0, 1, 0, 1, -1, 0, -1, 0],
]
LAMBDA_TAIL = [
    [0, 0, 0, 0, 2, 2, 2, 2],
    [0, 0, 1, 1, -1, -1, 0, 0],
    [1, 0, 0, -1, 1, 0, 0, -1],
    [0, 1, -1, 0, 0, 1, -1, 0],
]
F = Fraction
P3 = [[0, 0, 1, 0], [1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 0, 0],
      [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0]]
P_TAIL = [[F(1, 2), 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, 0], [0, 0, 0, 0],
          [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [F(1, 2), 0, 0, 0]]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


def brute_kernel_covector(gamma, c, box=3):
    """Smallest-magnitude integer r with Gamma^T r = 0 and r.c > 0, by enumeration."""
    m, n = len(gamma), len(gamma[0])
    best = None
    for r in itertools.product(range(-box, box + 1), repeat=m):
        if not any(r):
            continue
        if any(sum(r[i] * gamma[i][j] for i in range(m)) for j in range(n)):
            continue
        if sum(a * b for a, b in zip(r, c)) <= 0:
            continue
        key = (max(abs(v) for v in r), r)
        if best is None or key < best:
            best = key
    return best[1] if best else None


def flip_partner(i, k):
    """Partner of 1-based column i along coordinate k by flipping bit k-1 of i-1."""
    return ((i - 1) ^ (1 << (k - 1))) + 1


@pytest.fixture
def r2():
    return family_network(2)


@pytest.fixture
def r3():
    return family_network(3)


@pytest.fixture
def tail():
    return tail_network()


@pytest.fixture
def abc():
    return parse_network("A + B <-> C")
