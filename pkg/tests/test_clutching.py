import pytest

from stratakit.graphs.builders import dumbbell, from_edges, theta
from stratakit.posets.clutching import clutch_poset_map


def test_dumbbell_clutching(catalog):
    """Test the clutching map of the dumbbell: a square onto a three-element downset."""
    cmap = clutch_poset_map(dumbbell(), catalog)
    assert cmap.report.passed
    assert cmap.domain.size == 4
    assert cmap.quotient.poset.size == 3
    assert cmap.quotient.poset.height() == 3
    assert len(set(cmap.mapping)) == 3
    assert len(cmap.target.down(cmap.target_class)) == 3
    assert cmap.injective


def test_theta_clutching(catalog):
    """Test that theta is minimal: one tuple maps onto its own class."""
    cmap = clutch_poset_map(theta(), catalog)
    assert cmap.report.passed
    assert cmap.domain.size == 1
    assert cmap.mapping == (cmap.target_class,)


@pytest.mark.parametrize("genus_,legs", [(2, []), (1, ["a"])])
def test_every_class_clutches(catalog, genus_, legs):
    """Test monotonicity and surjectivity for every class of small types."""
    for c in catalog.get_table(genus_, legs).classes:
        cmap = clutch_poset_map(c.graph, catalog)
        assert cmap.report.passed, cmap.report.failed()


def test_unstable_template_rejected(catalog):
    """Test that templates must be stable."""
    with pytest.raises(ValueError, match="stable template"):
        clutch_poset_map(from_edges([0, 1], [(0, 1)], {"a": 0}), catalog)
