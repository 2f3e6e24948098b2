import pytest
from pydantic import ValidationError

from stratakit.categories.category import poset_category
from stratakit.categories.instances import random_twist_instance, z4_singleton_instance
from stratakit.categories.limits import SetValuedFunctor, random_set_functor
from stratakit.config import Budgets
from stratakit.posets.poset import FinPoset
from stratakit.twisted.decomposition import (
    Certificate,
    CertificateFailure,
    class_inclusion,
    decomposition_report,
    identity_fibre,
    isomorphism_class_poset,
    limit_decomposition_check,
    theorem_a_certificate,
    verify_certificate,
)
from stratakit.twisted.twisted_arrow import (
    TwFilter,
    comma_equivalence_check,
    filter_objects,
    subcategory,
    tw_alternative,
    tw_standard,
    twisted_comparison_report,
)

DECOMPOSITION_CHECKS = [
    "right_closed",
    "union_is_complement",
    "action_right_adjoint",
    "class_equivalence",
]


def small_instances(rng, count, max_elements=4, max_order=8):
    found = []
    for _ in range(200):
        inst = random_twist_instance(rng)
        if inst.poset.size <= max_elements and inst.group.order <= max_order:
            found.append(inst)
        if len(found) == count:
            break
    return found


def below_top(inst, tw=None):
    tw = tw or tw_alternative(inst.action, inst.delta)
    top = inst.poset.maximum()
    tw_theta, _ = subcategory(tw, inst.action, TwFilter(kind="theta", theta=top))
    return top, tw_theta


def test_standard_twisted_arrows_of_an_arrow():
    """Test the twisted arrow category of the walking arrow."""
    tw = tw_standard(poset_category(FinPoset.chain(2)))
    assert tw.category.num_objects == 3
    assert tw.category.num_morphisms == 5
    assert not tw.category.violations()


def test_pair_description_of_subsets(subsets):
    """Test objects of the pair description and its filters."""
    tw = tw_alternative(subsets.action, subsets.delta)
    assert tw.category.num_objects == 9
    top = subsets.element("{}")
    a = subsets.action
    assert len(filter_objects(tw, a, TwFilter(kind="b_gamma", theta=top))) == 1
    assert len(filter_objects(tw, a, TwFilter(kind="action_cat", theta=top))) == 4
    assert len(filter_objects(tw, a, TwFilter(kind="theta", theta=top))) == 9
    single = subsets.element("{1}")
    leq = filter_objects(tw, a, TwFilter(kind="leq_class", theta=top, nu=single))
    eq = filter_objects(tw, a, TwFilter(kind="eq_class", theta=top, nu=single))
    assert set(eq) < set(leq)


def test_filter_needs_representative():
    """Test that class filters require nu."""
    with pytest.raises(ValidationError, match="needs an orbit representative"):
        TwFilter(kind="leq_class", theta=0)


def test_filter_rejects_orbit_above_theta(subsets):
    """Test that the orbit of nu must reach below theta."""
    tw = tw_alternative(subsets.action, subsets.delta)
    bottom, top = subsets.element("{1,2}"), subsets.element("{}")
    with pytest.raises(ValueError, match="invalid filter"):
        upside_down = TwFilter(kind="leq_class", theta=bottom, nu=top)
        filter_objects(tw, subsets.action, upside_down)
    with pytest.raises(ValueError, match="invalid filter"):
        filter_objects(tw, subsets.action, TwFilter(kind="theta", theta=99))


def test_standard_mode_has_no_filters():
    """Test that filters need the pair description."""
    tw = tw_standard(poset_category(FinPoset.chain(2)))
    with pytest.raises(ValueError, match="pair description"):
        filter_objects(tw, None, TwFilter(kind="theta", theta=0))


@pytest.mark.parametrize("name", ["subsets", "join_free"])
def test_descriptions_are_equivalent(request, name):
    """Test that the comparison functor between both descriptions is an equivalence."""
    inst = request.getfixturevalue(name)
    report = twisted_comparison_report(inst.action, inst.delta)
    assert report.passed, report.failed()
    assert report.names() == ["functorial", "essentially_surjective", "fully_faithful"]


def test_descriptions_are_equivalent_on_random_instances(rng):
    """Test the comparison functor on seeded small instances and on Z/4."""
    instances = small_instances(rng, 8) + [z4_singleton_instance()]
    for inst in instances:
        report = twisted_comparison_report(inst.action, inst.delta)
        assert report.passed, (inst.name, report.failed())


def test_comma_categories_over_each_element(subsets):
    """Test that the poset over σ is equivalent to the coset category over σ."""
    for x in range(subsets.poset.size):
        assert comma_equivalence_check(subsets.action, subsets.delta, x).passed


def test_subsets_decomposition(subsets):
    """Test the decomposition below the top element, with fibre certificates."""
    top = subsets.element("{}")
    report = decomposition_report(subsets.action, subsets.delta, top, certificates=True)
    assert report.passed, report.failed()
    assert set(DECOMPOSITION_CHECKS + ["fibres_contractible"]) == set(report.names())


def test_decomposition_on_random_instances(rng):
    """Test the decomposition checks and certificates on seeded instances."""
    for inst in small_instances(rng, 6):
        top = inst.poset.maximum()
        report = decomposition_report(inst.action, inst.delta, top, certificates=True)
        assert report.passed, (inst.name, report.failed())


def test_certificates_verify(subsets):
    """Test that every certificate of the subsets instance re-verifies."""
    top, tw_theta = below_top(subsets)
    single = subsets.element("{1}")
    ci = class_inclusion(tw_theta, subsets.action, top, single)
    for x in range(ci.target.category.num_objects):
        fibre = identity_fibre(ci, subsets.action, x)
        cert = theorem_a_certificate(ci, subsets.action, x, fibre=fibre)
        assert isinstance(cert, Certificate)
        assert cert.fibre_equivalence
        assert verify_certificate(cert, fibre.identity).passed


def test_join_free_failure(join_free):
    """Test the diagnostics on a fibre whose cover has no meet."""
    p = join_free.poset
    s, a, t, n, top = (p.index(label) for label in ["s", "a", "t", "n", "T"])
    _, tw_theta = below_top(join_free)
    ci = class_inclusion(tw_theta, join_free.action, top, n)
    x = ci.target.object_of_pair(s, t)
    fibre = identity_fibre(ci, join_free.action, x)
    b = p.index("b")
    assert sorted(fibre.pairs) == sorted([(s, s), (s, a), (s, b), (a, a), (b, b)])
    outcome = theorem_a_certificate(ci, join_free.action, x, fibre=fibre)
    assert isinstance(outcome, CertificateFailure)
    assert outcome.obstruction == "intersection has no candidate terminal object"
    assert outcome.missing_meet == ["t", "n"]
    assert outcome.target == ["s", "t"]
    assert outcome.heuristic_label == "heuristic"
    assert outcome.heuristic.is_trivial


def test_join_free_fibre_with_terminal_object(join_free):
    """Test the one-piece certificate of a fibre with a terminal object."""
    p = join_free.poset
    s, a, n, top = (p.index(label) for label in ["s", "a", "n", "T"])
    _, tw_theta = below_top(join_free)
    ci = class_inclusion(tw_theta, join_free.action, top, n)
    x = ci.target.object_of_pair(s, a)
    fibre = identity_fibre(ci, join_free.action, x)
    cert = theorem_a_certificate(ci, join_free.action, x, fibre=fibre)
    assert isinstance(cert, Certificate)
    assert cert.cover_labels == ["whole fibre"]
    assert verify_certificate(cert, fibre.identity).passed


def test_join_free_decomposition_reports_failure(join_free):
    """Test that the certificate check fails on the join-free instance."""
    top = join_free.poset.index("T")
    a, d = join_free.action, join_free.delta
    report = decomposition_report(a, d, top, certificates=True)
    check = report.check("fibres_contractible")
    assert not check.passed
    assert any(f.get("missing_meet") == ["t", "n"] for f in check.details["failures"])


def test_isomorphism_class_poset(subsets):
    """Test that isomorphic objects collapse to one element."""
    tw = tw_alternative(subsets.action, subsets.delta)
    classes = isomorphism_class_poset(tw.category)
    assert classes.size < tw.category.num_objects


def test_limit_decomposition(subsets, rng):
    """Test limit bijections against brute force on seeded functors."""
    top, tw_theta = below_top(subsets)
    for _ in range(20):
        f = random_set_functor(tw_theta.category, rng)
        report = limit_decomposition_check(subsets.action, tw_theta, top, f)
        assert report.passed, report.failed()


def test_limit_decomposition_on_random_instances(rng):
    """Test limit bijections on seeded instances."""
    for inst in small_instances(rng, 4):
        top, tw_theta = below_top(inst)
        for _ in range(5):
            f = random_set_functor(tw_theta.category, rng)
            report = limit_decomposition_check(inst.action, tw_theta, top, f)
            assert report.passed, (inst.name, report.failed())


def test_brute_force_over_budget_is_skipped(subsets):
    """Test that an unaffordable brute-force comparison is skipped, not passed."""
    top, tw_theta = below_top(subsets)
    f = SetValuedFunctor.constant(tw_theta.category, 2)
    budgets = Budgets(max_product_size=200)
    report = limit_decomposition_check(subsets.action, tw_theta, top, f, budgets)
    check = report.check("brute_force_agrees")
    assert check.skipped
    assert not check.passed
    assert check.message.startswith("Skipped: brute force over budget")
    assert report.passed, report.failed()


def test_limit_decomposition_needs_matching_category(subsets, rng):
    """Test that the functor must live on the pairs below theta."""
    top, tw_theta = below_top(subsets)
    other = random_set_functor(poset_category(FinPoset.chain(2)), rng)
    with pytest.raises(ValueError, match="pairs below theta"):
        limit_decomposition_check(subsets.action, tw_theta, top, other)
