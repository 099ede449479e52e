"""Shared fixtures: cached eigen systems, bump initial data, criterion log.

Eigen decompositions are the only expensive shared setup, so they are built
once per session and keyed by (alpha, n, R, nu).  Acceptance tests record a
one-line PASS/FAIL verdict each; the terminal-summary hook prints the
collected lines after the test run.
"""

import os

import numpy as np
import pytest

from fracstorm.kernels import build_discrete_generator, eigen_system
from fracstorm.params import ModelParams, SpaceGrid

#: thread count used by tests that exercise the parallel paths; results are
#: bitwise independent of this value by design.
TEST_THREADS = min(4, os.cpu_count() or 1)

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def eigen_cache():
    cache = {}

    def get(alpha, n, R=1.0, nu=1.0):
        key = (float(alpha), int(n), float(R), float(nu))
        if key not in cache:
            p = ModelParams(alpha=alpha, beta=0.5, nu=nu, R=R)
            grid = SpaceGrid(R=R, n=n)
            cache[key] = eigen_system(build_discrete_generator(p, grid), grid)
        return cache[key]

    return get


@pytest.fixture
def bump():
    def make(es, amplitude=1.0):
        grid = es.grid
        return amplitude * np.cos(0.5 * np.pi * grid.nodes / grid.R)

    return make


@pytest.fixture
def criterion():
    """Record one acceptance-criterion verdict line; returns ``ok``."""

    def record(number, label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {label} ({detail})"
        _ACCEPTANCE_LINES.append((number, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
