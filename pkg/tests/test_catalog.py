import pytest

from stratakit.catalog.catalog import StratumCatalog
from stratakit.enumeration.strata import enumerate_strata
from stratakit.graphs.builders import dumbbell, theta
from stratakit.graphs.dual_graph import random_relabeling


@pytest.fixture
def fresh_catalog():
    """Fixture to create an empty catalog for each test."""
    return StratumCatalog()


def test_get_table_caches(fresh_catalog):
    """Test that a type is enumerated once and then served from the cache."""
    first = fresh_catalog.get_table(1, ["a"])
    assert fresh_catalog.get_table(1, ["a"]) is first
    assert fresh_catalog.list_types() == [(1, ["a"])]


def test_key_ignores_leg_order(fresh_catalog):
    """Test that leg order does not change the type key."""
    key = fresh_catalog.key(0, ["a", "b", "c"])
    assert fresh_catalog.key(0, ["c", "a", "b"]) == key


def test_get_poset_caches(fresh_catalog):
    """Test that posets are built once."""
    p = fresh_catalog.get_poset(1, ["a"])
    assert fresh_catalog.get_poset(1, ["a"]) is p
    assert p.size == 2


def test_register_table(fresh_catalog):
    """Test registering a table computed elsewhere."""
    table = enumerate_strata(0, ["a", "b", "c", "d"])
    fresh_catalog.register_table(table)
    assert fresh_catalog.get_table(0, ["d", "c", "b", "a"]) is table


def test_classify(fresh_catalog, rng):
    """Test locating relabeled graphs in their table."""
    key, theta_id = fresh_catalog.classify(theta())
    assert key == (2, frozenset())
    relabeled, _, _ = random_relabeling(theta(), rng)
    assert fresh_catalog.classify(relabeled)[1] == theta_id
    assert fresh_catalog.classify(dumbbell())[1] != theta_id


def test_invalid_type(fresh_catalog):
    """Test that unstable types are refused by the catalog."""
    with pytest.raises(ValueError, match="No stable curves"):
        fresh_catalog.get_table(1, [])
