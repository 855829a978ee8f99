import pathlib

import numpy as np
import pytest

from polarization2d.geometry import BUILTIN_DOMAINS, builtin_curve
from polarization2d.oracle import read_fixtures
from polarization2d.pipeline import Problem

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "tests" / "fixtures" / "oracle_fixtures.json"
DOMAINS = ROOT / "domains"

_cache = {}


def problem(name, n=256):
    """Session-wide cache of built-in problems (operators are read-only)."""
    key = (name, n)
    if key not in _cache:
        _cache[key] = Problem(builtin_curve(name), n)
    return _cache[key]


@pytest.fixture(scope="session")
def oracle_fixtures():
    return read_fixtures(FIXTURES)


@pytest.fixture(params=BUILTIN_DOMAINS)
def builtin(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
