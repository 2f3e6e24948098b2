import random

import pytest

from stratakit.catalog.catalog import StratumCatalog
from stratakit.categories.instances import join_free_instance, subsets_instance
from stratakit.config import BUDGET_ENV, LOG_LEVEL_ENV, reset_settings
from stratakit.graphs.builders import genus_six_chain


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Fixture to make every test read settings from a clean environment."""
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    """Fixture to create the seeded random source used by randomized suites."""
    return random.Random(0)


@pytest.fixture(scope="session")
def catalog():
    """Fixture to share enumerated stratum tables across the session."""
    return StratumCatalog()


@pytest.fixture
def chain():
    """Fixture to create the four genus-6 graphs forming a specialisation chain."""
    return genus_six_chain()


@pytest.fixture(scope="session")
def subsets():
    """Fixture to create the subsets-of-{1,2} instance."""
    return subsets_instance()


@pytest.fixture(scope="session")
def join_free():
    """Fixture to create the instance whose fibres lack meets."""
    return join_free_instance()
