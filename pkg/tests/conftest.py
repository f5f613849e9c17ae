import numpy as np
import pytest

from gapfill import BandGeometry, partition
from gapfill.band_space import POSITIVITY_FLOOR, gram_condition, xi


def random_instances(count, seed=20240601, max_size=5, max_n=60, max_time=40, cond_max=1e8,
                     skipped=None):
    """Random ``(T, n)`` with ``|T| <= max_size``, ``n <= max_n`` and a usable Gram matrix.

    Draws whose projection mass falls below the positivity floor are skipped
    as well (the weight is undefined there); pass a list as ``skipped`` to
    collect them.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        size = int(rng.integers(1, max_size + 1))
        T = tuple(sorted(int(v) for v in rng.choice(np.arange(-max_time, max_time + 1), size, replace=False)))
        n = int(rng.integers(2, max_n + 1))
        s = partition(T, n)
        if s.ordering and gram_condition(s.ordering, BandGeometry(n)) >= cond_max:
            continue
        if xi(s, BandGeometry(n)).inner_cos(0) <= POSITIVITY_FLOOR:
            if skipped is not None:
                skipped.append((T, n))
            continue
        out.append((T, n))
    return out


@pytest.fixture(scope="session")
def instances20():
    return random_instances(20)


ACCEPTANCE_LINES = []


def acceptance(label, passed, detail=""):
    """Record one criterion outcome for the terminal summary and return ``passed``."""
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
