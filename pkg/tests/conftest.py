from __future__ import annotations

import functools

import pytest

from toric_alpha.catalog import catalog, lookup
from toric_alpha.symmetry import automorphism_group

CATALOG_NAMES = [e.name for e in catalog()]


@functools.lru_cache(maxsize=None)
def entry(name):
    return lookup(name)


@functools.lru_cache(maxsize=None)
def poly(name):
    return lookup(name).polytope()


@functools.lru_cache(maxsize=None)
def aut(name):
    return automorphism_group(poly(name))


@pytest.fixture(params=CATALOG_NAMES)
def catalog_name(request):
    return request.param


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
