"""Shared fixtures and hypothesis profiles."""
import os

import pytest
from hypothesis import settings

from onofri import sphere

settings.register_profile("ci", deadline=None)
settings.register_profile("dev", max_examples=10, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def grid8():
    return sphere.build_grid(8)


@pytest.fixture(scope="session")
def grid16():
    return sphere.build_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return sphere.build_grid(32)
