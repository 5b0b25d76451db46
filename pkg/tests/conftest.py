import itertools

import numpy as np
import pytest

from aetf.gf2 import FrameShape
from aetf.spectra import IndexSet

ACCEPTANCE_LINES = []


def bent_difference_set(k):
    """Support of a.b over GF(2)^k x GF(2)^k: a (4^k, 2^(2k-1) - 2^(k-1)) Hadamard DS."""
    n = 1 << (2 * k)
    idx = [x for x in range(n) if bin((x >> k) & x & ((1 << k) - 1)).count("1") % 2]
    return IndexSet(tuple(idx), FrameShape(n, len(idx)))


def all_subsets(n_plus, m):
    shape = FrameShape(n_plus, m)
    for combo in itertools.combinations(range(n_plus), m):
        yield IndexSet(combo, shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
