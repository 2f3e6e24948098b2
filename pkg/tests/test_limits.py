import pytest

from stratakit.categories.category import poset_category
from stratakit.categories.coset_category import cl_category
from stratakit.categories.limits import (
    SetValuedFunctor,
    brute_force_limit,
    clamp_functor,
    limit_set,
    random_set_functor,
)
from stratakit.config import Budgets
from stratakit.errors import BudgetExceededError
from stratakit.posets.poset import FinPoset


@pytest.fixture
def chain3():
    """Fixture to create the three-element chain as a category."""
    return poset_category(FinPoset.chain(3), name="chain")


@pytest.fixture
def vee():
    """Fixture to create a cospan a -> c <- b."""
    p = FinPoset.from_pairs(["a", "b", "c"], [(0, 2), (1, 2)])
    return poset_category(p, name="cospan")


def test_constant_functor(chain3):
    """Test that a constant functor on a connected category has one family per value."""
    f = SetValuedFunctor.constant(chain3, 3)
    assert limit_set(f) == [(0, 0, 0), (1, 1, 1), (2, 2, 2)]


def test_representables(chain3):
    """Test limits of representable functors."""
    assert len(limit_set(SetValuedFunctor.representable(chain3, 0))) == 1
    assert limit_set(SetValuedFunctor.representable(chain3, 2)) == []


def test_pullback(vee):
    """Test that the limit over a cospan is the fibre product."""
    f = clamp_functor(vee, [3, 2, 2])
    families = limit_set(f)
    assert families == [(0, 0, 0), (1, 1, 1), (2, 1, 1)]
    assert families == brute_force_limit(f)


def test_invalid_functor(chain3):
    """Test that maps must land in the target set."""
    with pytest.raises(ValueError, match="not a function"):
        SetValuedFunctor(chain3, [[0], [0], [0]], [[0], [5], [0], [0], [0], [0]])


def test_clamp_rejects_empty_target(chain3):
    """Test that a nonempty set cannot map to an empty one."""
    with pytest.raises(ValueError, match="empty"):
        clamp_functor(chain3, [1, 0, 0])


def test_brute_force_budget(chain3):
    """Test that the product budget stops exhaustive search."""
    f = SetValuedFunctor.constant(chain3, 3)
    with pytest.raises(BudgetExceededError, match="max_product_size"):
        brute_force_limit(f, budgets=Budgets(max_product_size=10))


def test_restrict_along_inclusion(chain3):
    """Test that restriction along a full subcategory keeps the sets."""
    f = clamp_functor(chain3, [3, 2, 1])
    sub, inclusion = chain3.full_subcategory([0, 1])
    g = f.restrict(inclusion)
    assert g.category is sub
    assert not g.violations()
    assert len(limit_set(g)) == 3


def test_random_functors_match_brute_force(rng, subsets):
    """Test the propagating search against exhaustive enumeration on random functors."""
    square = FinPoset.from_pairs(list(range(5)), [(0, 1), (0, 2), (1, 3), (2, 3)])
    categories = [poset_category(square)]
    categories.append(cl_category(subsets.action, subsets.delta))
    for c in categories:
        for _ in range(20):
            f = random_set_functor(c, rng)
            assert not f.violations()
            assert limit_set(f) == brute_force_limit(f)


def test_coproduct_of_constants(chain3):
    """Test that limits over a connected category add up over a disjoint union."""
    f = SetValuedFunctor.coproduct(
        [SetValuedFunctor.constant(chain3, 1), SetValuedFunctor.constant(chain3, 2)]
    )
    assert [f.size(x) for x in range(3)] == [3, 3, 3]
    assert f.sets[0] == ((0, 0), (1, 0), (1, 1))
    assert len(limit_set(f)) == 3


def test_coproduct_needs_summands(chain3, vee):
    """Test that summands must exist and share their category."""
    with pytest.raises(ValueError, match="at least one summand"):
        SetValuedFunctor.coproduct([])
    with pytest.raises(ValueError, match="share their category"):
        SetValuedFunctor.coproduct(
            [SetValuedFunctor.constant(chain3, 1), SetValuedFunctor.constant(vee, 1)]
        )


def test_representable_quotients(subsets):
    """Test quotients of representables by groups of automorphisms."""
    c = cl_category(subsets.action, subsets.delta)
    for x in range(c.num_objects):
        plain = SetValuedFunctor.representable(c, x)
        assert SetValuedFunctor.representable_quotient(c, x, []).maps == plain.maps
        automorphisms = [h for h in c.hom(x, x) if c.is_iso(h)]
        f = SetValuedFunctor.representable_quotient(c, x, automorphisms)
        assert not f.violations()
        for y in range(c.num_objects):
            assert f.size(y) * len(automorphisms) == plain.size(y)
        assert limit_set(f) == brute_force_limit(f)


def test_quotient_rejects_non_automorphism(chain3):
    """Test that only automorphisms of the chosen object generate the group."""
    arrow = chain3.hom(0, 1)[0]
    with pytest.raises(ValueError, match="not an automorphism"):
        SetValuedFunctor.representable_quotient(chain3, 0, [arrow])


def test_random_functors_have_nontrivial_actions(rng, subsets):
    """Test that some seeded functors move elements along non-identity endomorphisms."""
    c = cl_category(subsets.action, subsets.delta)
    endomorphisms = [
        m for m, (x, y, _) in enumerate(c.morphisms) if x == y and m != c.identity(x)
    ]
    functors = [random_set_functor(c, rng) for _ in range(20)]
    assert all(max(f.size(x) for x in range(c.num_objects)) <= 4 for f in functors)
    assert any(
        f.maps[m] != tuple(range(f.size(c.src(m))))
        for f in functors
        for m in endomorphisms
    )
