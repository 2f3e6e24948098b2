"""
Decompositions of the twisted arrows over an element θ and of limits of functors out of
them.

All checks work on the pair description from tw_alternative. Orbit classes are named by
their least element index.
"""
from itertools import combinations
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
from pydantic import BaseModel

from stratakit.categories.category import (
    FinCategory,
    Functor,
    check_equivalence,
    comma_category,
    find_right_adjoint,
)
from stratakit.categories.coset_category import DeltaFamily
from stratakit.categories.limits import (
    Family,
    SetValuedFunctor,
    brute_force_limit,
    limit_set,
)
from stratakit.checks.engine import CheckEngine, CheckSkipped, Report
from stratakit.config import Budgets, get_budgets
from stratakit.errors import BudgetExceededError, StratakitError
from stratakit.posets.actions import GroupAction
from stratakit.posets.homology import HomologyResult, order_complex_homology
from stratakit.posets.poset import FinPoset
from stratakit.twisted.twisted_arrow import (
    TwCategory,
    TwFilter,
    filter_objects,
    subcategory,
    tw_alternative,
)

logger = logging.getLogger(__name__)


def classes_below(a: GroupAction, theta: int) -> List[List[int]]:
    """Orbits with a member below θ, ordered by least element."""
    p = a.target
    return [orb for orb in a.orbits() if any(p.is_leq(mu, theta) for mu in orb)]


def _label(a: GroupAction, x: int) -> str:
    return str(a.target.elements[x])


def _pair_label(a: GroupAction, pair: Tuple[int, int]) -> str:
    return f"{_label(a, pair[0])} <= {_label(a, pair[1])}"


class ClassInclusion(NamedTuple):
    """Inclusion of the pairs over the orbit of ν into those with σ below that orbit."""
    source: TwCategory
    target: TwCategory
    inclusion: Functor
    theta: int
    nu: int


def class_inclusion(
    tw: TwCategory, a: GroupAction, theta: int, nu: int
) -> ClassInclusion:
    target, _ = subcategory(tw, a, TwFilter(kind="leq_class", theta=theta, nu=nu))
    members = filter_objects(target, a, TwFilter(kind="eq_class", theta=theta, nu=nu))
    sub, inclusion = target.category.full_subcategory(
        members,
        name=f"pairs over the class of {_label(a, nu)} below {_label(a, theta)}",
    )
    pairs = tuple(target.pairs[i] for i in members)
    source = TwCategory(category=sub, pairs=pairs, mode=target.mode)
    return ClassInclusion(
        source=source, target=target, inclusion=inclusion, theta=theta, nu=nu
    )


def decomposition_report(
    a: GroupAction,
    d: DeltaFamily,
    theta: int,
    tw: Optional[TwCategory] = None,
    certificates: bool = False,
    budgets: Optional[Budgets] = None,
) -> Report:
    """
    Check how the twisted arrows below θ decompose.

    Args:
        a: The group action
        d: The subgroup family
        theta: Index of θ
        tw: tw_alternative(a, d), built when omitted
        certificates: Also certify every fibre of every class inclusion
        budgets: Optional budget override

    Returns:
        Report with checks right_closed, union_is_complement, action_right_adjoint,
        class_equivalence and, when requested, fibres_contractible
    """
    p = a.target
    if not 0 <= theta < p.size:
        raise StratakitError(f"theta {theta} is not a poset element")
    tw = tw if tw is not None else tw_alternative(a, d, budgets=budgets)
    tw_theta, _ = subcategory(tw, a, TwFilter(kind="theta", theta=theta))
    c = tw_theta.category
    theta_orbit = a.orbit(theta)
    classes = classes_below(a, theta)
    lower = [orb for orb in classes if orb != theta_orbit]
    top = tw_theta.object_of_pair(theta, theta)
    engine = CheckEngine(f"decomposition below {_label(a, theta)}")

    def below_class(nu: int) -> List[int]:
        return filter_objects(
            tw_theta, a, TwFilter(kind="leq_class", theta=theta, nu=nu)
        )

    def right_closed():
        subsets = [
            (f"class of {_label(a, orb[0])}", below_class(orb[0])) for orb in classes
        ]
        action = filter_objects(
            tw_theta, a, TwFilter(kind="action_cat", theta=theta)
        )
        subsets.append(("action category", action))
        for name, members in subsets:
            witness = c.right_closed(members)
            if witness is not None:
                return False, f"Subcategory {name} is not right closed", {
                    "subcategory": name,
                    "source": _pair_label(a, tw_theta.pairs[c.src(witness)]),
                    "target": _pair_label(a, tw_theta.pairs[c.tgt(witness)]),
                }
        return True, f"{len(subsets)} subcategories are right closed", None

    def union_is_complement():
        union = set()
        for orb in lower:
            union.update(below_class(orb[0]))
        complement = set(range(c.num_objects)) - {top}
        if union == complement:
            message = (
                f"{len(lower)} lower classes cover the {len(complement)} pairs "
                f"off the top"
            )
            return True, message, None

        def labels(indices):
            return [_pair_label(a, tw_theta.pairs[i]) for i in sorted(indices)]

        message = (
            "Union of the lower classes differs from the complement of the top pair"
        )
        return False, message, {
            "extra": labels(union - complement),
            "missing": labels(complement - union),
        }

    def action_right_adjoint():
        action, _ = subcategory(tw_theta, a, TwFilter(kind="action_cat", theta=theta))
        _, inclusion = action.category.full_subcategory(
            [action.object_of_pair(theta, theta)], name="stabilizer of the top pair"
        )
        search = find_right_adjoint(inclusion)
        if search.exists:
            return True, "Inclusion of the top pair has a right adjoint", {
                "objects": action.category.num_objects
            }
        return False, "Comma categories without terminal object", {
            "objects": [_pair_label(a, action.pairs[x]) for x in search.missing]
        }

    def class_equivalence():
        for orb in classes:
            nu = min(mu for mu in orb if p.is_leq(mu, theta))
            over, _ = subcategory(
                tw, a, TwFilter(kind="eq_class", theta=theta, nu=orb[0])
            )
            members = [i for i, (_, t) in enumerate(over.pairs) if p.is_leq(t, nu)]
            _, inclusion = over.category.full_subcategory(members)
            report = check_equivalence(inclusion)
            if not report.passed:
                message = (
                    f"Pairs below {_label(a, nu)} are not equivalent to their class"
                )
                return False, message, {
                    "class": _label(a, orb[0]),
                    "failed": [r.name for r in report.failed()],
                }
        return True, f"{len(classes)} class inclusions are equivalences", None

    def fibres_contractible():
        certified, failures = 0, []
        for orb in classes:
            ci = class_inclusion(tw_theta, a, theta, orb[0])
            for x in range(ci.target.category.num_objects):
                fibre = identity_fibre(ci, a, x)
                outcome = theorem_a_certificate(
                    ci, a, x, fibre=fibre, budgets=budgets
                )
                if (
                    isinstance(outcome, Certificate)
                    and verify_certificate(outcome, fibre.identity).passed
                ):
                    certified += 1
                else:
                    failures.append(outcome.model_dump())
        if failures:
            return False, f"{len(failures)} fibres without a certificate", {
                "failures": failures
            }
        return True, f"{certified} fibres certified", None

    engine.add_check("right_closed", right_closed)
    engine.add_check("union_is_complement", union_is_complement)
    engine.add_check("action_right_adjoint", action_right_adjoint)
    if certificates:
        engine.add_check("fibres_contractible", fibres_contractible)
    engine.add_check("class_equivalence", class_equivalence)
    return engine.run()


class IdentityFibre(NamedTuple):
    """The comma category over an object and its full subcategory on the [id]-arrows."""
    fibre: FinCategory
    identity: FinCategory
    inclusion: Functor
    pairs: Tuple[Tuple[int, int], ...]


def identity_fibre(ci: ClassInclusion, a: GroupAction, x: int) -> IdentityFibre:
    """Comma category of the class inclusion over object x and its [id] part."""
    fibre, _ = comma_category(ci.inclusion, x)
    d_cat = ci.target.category
    identity = a.group.identity_id
    members = [
        i for i, (_, m) in enumerate(fibre.objects) if d_cat.payload(m) == identity
    ]
    sub, inclusion = fibre.full_subcategory(
        members, name=f"identity part of {fibre.name}"
    )
    source = ci.source
    pairs = tuple(
        source.pairs[source.category.object_index(fibre.objects[i][0])]
        for i in members
    )
    return IdentityFibre(fibre=fibre, identity=sub, inclusion=inclusion, pairs=pairs)


class IntersectionRecord(BaseModel):
    indices: List[int]
    members: List[int]
    terminal: int


class Certificate(BaseModel):
    """A left closed cover of a fibre whose intersections all have terminal objects."""
    theta: str
    nu: str
    target: List[str]
    objects: List[str]
    cover_labels: List[str]
    cover: List[List[int]]
    intersections: List[IntersectionRecord]
    initial: List[int]
    fibre_equivalence: bool


class CertificateFailure(BaseModel):
    """Why no certificate was found, with homology computed as a labelled heuristic."""
    theta: str
    nu: str
    target: List[str]
    obstruction: str
    missing_meet: Optional[List[str]] = None
    heuristic_label: str = "heuristic"
    heuristic: Optional[HomologyResult] = None


def isomorphism_class_poset(c: FinCategory) -> FinPoset:
    """Isomorphism classes of objects ordered by the existence of morphisms."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(c.num_objects))
    graph.add_edges_from((s, t) for s, t, _ in c.morphisms if s != t)
    condensed = nx.condensation(graph)
    order = sorted(condensed.nodes, key=lambda n: min(condensed.nodes[n]["members"]))
    position = {n: i for i, n in enumerate(order)}
    leq = [[False] * len(order) for _ in order]
    for n in order:
        leq[position[n]][position[n]] = True
        for m in nx.descendants(condensed, n):
            leq[position[n]][position[m]] = True
    labels = [str(c.objects[min(condensed.nodes[n]["members"])]) for n in order]
    return FinPoset(labels, leq)


def theorem_a_certificate(
    ci: ClassInclusion,
    a: GroupAction,
    x: int,
    fibre: Optional[IdentityFibre] = None,
    budgets: Optional[Budgets] = None,
) -> Union[Certificate, CertificateFailure]:
    """
    Certify that the fibre of the class inclusion over object x is contractible.

    The fibre is replaced by its [id] part. A fibre with a terminal object gets a
    one-piece cover. Otherwise the cover has one piece per orbit element μ of ν above σ,
    holding the pairs with τ′ <= μ; the intersection over an index set I must have the
    terminal object (σ <= meet of τ and the μ_i).

    Args:
        ci: The class inclusion
        a: The group action
        x: Object (σ <= τ) of ci.target
        fibre: identity_fibre(ci, a, x), computed when omitted
        budgets: Optional budget override; max_product_size bounds the index sets

    Returns:
        A Certificate, or a CertificateFailure carrying the obstruction and the
        heuristic
    """
    p = a.target
    sigma, tau = ci.target.pairs[x]
    fibre = fibre if fibre is not None else identity_fibre(ci, a, x)
    fid = fibre.identity
    header = {
        "theta": _label(a, ci.theta),
        "nu": _label(a, ci.nu),
        "target": [_label(a, sigma), _label(a, tau)],
    }

    def failure(
        obstruction: str, missing: Optional[List[str]] = None
    ) -> CertificateFailure:
        heuristic = None
        if fibre.fibre.num_objects:
            heuristic = order_complex_homology(
                isomorphism_class_poset(fibre.fibre), 2, truncate=True, budgets=budgets
            )
        logger.warning(f"No certificate over {header['target']}: {obstruction}")
        return CertificateFailure(
            obstruction=obstruction, missing_meet=missing, heuristic=heuristic, **header
        )

    equivalence = check_equivalence(fibre.inclusion).passed
    objects = [_pair_label(a, pair) for pair in fibre.pairs]
    everything = list(range(fid.num_objects))
    terminal = fid.terminal_object()
    if terminal is not None:
        whole = IntersectionRecord(indices=[0], members=everything, terminal=terminal)
        return Certificate(
            objects=objects,
            cover_labels=["whole fibre"],
            cover=[everything],
            intersections=[whole],
            initial=[0],
            fibre_equivalence=equivalence,
            **header,
        )

    mus = [mu for mu in a.orbit(ci.nu) if p.is_leq(sigma, mu)]
    cover = [
        [i for i, (_, t) in enumerate(fibre.pairs) if p.is_leq(t, mu)] for mu in mus
    ]
    for mu, piece in zip(mus, cover):
        if fid.left_closed(piece) is not None:
            return failure(f"cover piece below {_label(a, mu)} is not left closed")
    if sorted(set().union(*cover)) != everything:
        return failure("cover pieces do not exhaust the fibre")

    limit = get_budgets(budgets).max_product_size
    if 2 ** len(mus) > limit:
        raise BudgetExceededError("max_product_size", limit, 2 ** len(mus))
    records = []
    for k in range(1, len(mus) + 1):
        for indices in combinations(range(len(mus)), k):
            members = sorted(set.intersection(*(set(cover[i]) for i in indices)))
            chosen = [_label(a, mus[i]) for i in indices]
            meet = p.meet([tau] + [mus[i] for i in indices])
            if meet is None:
                return failure(
                    "intersection has no candidate terminal object",
                    missing=[_label(a, tau)] + chosen,
                )
            candidate = next(
                (i for i in members if fibre.pairs[i] == (sigma, meet)), None
            )
            if candidate is None or any(
                len(fid.hom(y, candidate)) != 1 for y in members
            ):
                return failure(f"intersection over {chosen} has no terminal object")
            records.append(
                IntersectionRecord(
                    indices=list(indices), members=members, terminal=candidate
                )
            )

    logger.debug(
        f"Certified fibre over {header['target']} with {len(mus)} cover pieces"
    )
    return Certificate(
        objects=objects,
        cover_labels=[_label(a, mu) for mu in mus],
        cover=cover,
        intersections=records,
        initial=list(range(len(mus))),
        fibre_equivalence=equivalence,
        **header,
    )


def verify_certificate(certificate: Certificate, fid: FinCategory) -> Report:
    """Re-check a certificate against the [id] part of its fibre."""
    engine = CheckEngine(f"certificate over {' <= '.join(certificate.target)}")
    cover = [set(piece) for piece in certificate.cover]

    def covers():
        union = set().union(*cover) if cover else set()
        if union == set(range(fid.num_objects)):
            return True, f"{len(cover)} pieces cover {fid.num_objects} objects", None
        missing = sorted(set(range(fid.num_objects)) - union)
        return False, "Cover misses objects", {"missing": missing}

    def left_closed():
        for label, piece in zip(certificate.cover_labels, certificate.cover):
            if fid.left_closed(piece) is not None:
                return False, f"Piece {label} is not left closed", None
        return True, "Every piece is left closed", None

    def terminals():
        seen = set()
        for record in certificate.intersections:
            seen.add(tuple(record.indices))
            expected = set.intersection(*(cover[i] for i in record.indices))
            details = {"indices": record.indices}
            if set(record.members) != expected:
                return False, "Recorded intersection differs from the cover", details
            if record.terminal not in expected or any(
                len(fid.hom(y, record.terminal)) != 1 for y in expected
            ):
                message = "Recorded object is not terminal in its intersection"
                return False, message, details
        nonempty = [
            indices
            for k in range(1, len(cover) + 1)
            for indices in combinations(range(len(cover)), k)
            if set.intersection(*(cover[i] for i in indices))
        ]
        missing = [list(i) for i in nonempty if i not in seen]
        if missing:
            return False, "Nonempty intersections without a record", {
                "indices": missing[:5]
            }
        message = (
            f"{len(certificate.intersections)} intersections have terminal objects"
        )
        return True, message, None

    def initial():
        if not certificate.intersections:
            return False, "No intersections recorded", None
        base = set()
        if certificate.initial:
            base = set.intersection(*(cover[i] for i in certificate.initial))
        if not base:
            return False, "Initial intersection is empty", None
        if all(base <= set(r.members) for r in certificate.intersections):
            return True, "Intersection poset has an initial element", {
                "indices": certificate.initial
            }
        return False, "Recorded initial intersection is not the smallest", None

    def fibre_equivalence():
        if certificate.fibre_equivalence:
            return True, "Fibre is equivalent to its [id] part", None
        return False, "Fibre is not equivalent to its [id] part", None

    engine.add_check("covers", covers)
    engine.add_check("left_closed", left_closed)
    engine.add_check("terminals", terminals)
    engine.add_check("initial", initial)
    engine.add_check("fibre_equivalence", fibre_equivalence)
    return engine.run()


def _restrict(family: Family, members: Sequence[int]) -> Family:
    return tuple(family[i] for i in members)


def _limit_on(
    f: SetValuedFunctor,
    c: FinCategory,
    members: Sequence[int],
    budgets: Optional[Budgets],
) -> Tuple[List[int], List[Family]]:
    members = sorted(members)
    _, inclusion = c.full_subcategory(members)
    return members, limit_set(f.restrict(inclusion), budgets)


def _bijection(
    source: Sequence[Family], target: Sequence, image
) -> Tuple[bool, Dict[str, int]]:
    images = [image(x) for x in source]
    details = {
        "source": len(source),
        "target": len(target),
        "image": len(set(images)),
    }
    return len(set(images)) == len(images) and set(images) == set(target), details


def limit_decomposition_check(
    a: GroupAction,
    tw_theta: TwCategory,
    theta: int,
    f: SetValuedFunctor,
    budgets: Optional[Budgets] = None,
) -> Report:
    """
    Compare limits of a set-valued functor on the pairs below θ with limits over pieces.

    Args:
        a: The group action
        tw_theta: The pairs below θ, as from
            subcategory(tw, a, TwFilter(kind="theta", ...))
        theta: Index of θ
        f: A set-valued functor on tw_theta.category
        budgets: Optional budget override

    Returns:
        Report with the limit cardinalities and checks boundary_pullback,
        action_restriction, class_limit, restriction_below and brute_force_agrees
    """
    c = tw_theta.category
    if f.category is not c:
        raise StratakitError("Functor must be defined on the pairs below theta")
    p = a.target
    top = tw_theta.object_of_pair(theta, theta)
    everything = limit_set(f, budgets)
    off_top = [i for i in range(c.num_objects) if i != top]
    boundary, boundary_limit = _limit_on(f, c, off_top, budgets)
    action_members = filter_objects(
        tw_theta, a, TwFilter(kind="action_cat", theta=theta)
    )
    action, action_limit = _limit_on(f, c, action_members, budgets)
    overlap, overlap_limit = _limit_on(f, c, [i for i in action if i != top], budgets)
    theta_orbit = a.orbit(theta)
    lower = [orb for orb in classes_below(a, theta) if orb != theta_orbit]
    engine = CheckEngine(f"limits below {_label(a, theta)}")

    def boundary_pullback():
        at_boundary = {i: k for k, i in enumerate(boundary)}
        on_action = {i: k for k, i in enumerate(action)}
        by_overlap: Dict[Family, List[Family]] = {}
        for v in action_limit:
            by_overlap.setdefault(tuple(v[on_action[i]] for i in overlap), []).append(v)
        pullback = [
            (u, v)
            for u in boundary_limit
            for v in by_overlap.get(tuple(u[at_boundary[i]] for i in overlap), [])
        ]
        passed, details = _bijection(
            everything,
            pullback,
            lambda x: (_restrict(x, boundary), _restrict(x, action)),
        )
        details.update(
            {
                "boundary": len(boundary_limit),
                "action": len(action_limit),
                "overlap": len(overlap_limit),
            }
        )
        if passed:
            message = "Limit is the pullback over the boundary of the action category"
            return True, message, details
        return False, "Limit differs from the pullback", details

    def action_restriction():
        position = action.index(top)
        _, top_limit = _limit_on(f, c, [top], budgets)
        passed, details = _bijection(action_limit, top_limit, lambda v: (v[position],))
        if passed:
            message = "Action category limit restricts bijectively to the top pair"
            return True, message, details
        message = "Action category limit differs from the value at the top pair"
        return False, message, details

    def class_limit():
        pieces = []
        for orb in lower:
            members = filter_objects(
                tw_theta, a, TwFilter(kind="leq_class", theta=theta, nu=orb[0])
            )
            pieces.append(_limit_on(f, c, members, budgets))
        related = [
            (i, j)
            for i, mu in enumerate(lower)
            for j, nu in enumerate(lower)
            if i != j and any(p.is_leq(x, y) for x in mu for y in nu)
        ]
        compatible = _compatible_families(pieces, related, budgets)
        at_boundary = {i: k for k, i in enumerate(boundary)}

        def split(u: Family) -> Tuple[Family, ...]:
            return tuple(
                tuple(u[at_boundary[i]] for i in members) for members, _ in pieces
            )

        passed, details = _bijection(boundary_limit, compatible, split)
        details["classes"] = len(lower)
        if passed:
            return True, "Boundary limit is the limit over the lower classes", details
        message = "Boundary limit differs from the limit over the lower classes"
        return False, message, details

    def restriction_below():
        for nu in p.down(theta):
            over_class = filter_objects(
                tw_theta, a, TwFilter(kind="leq_class", theta=theta, nu=nu)
            )
            members, class_limit_set = _limit_on(f, c, over_class, budgets)
            below = [
                k for k, i in enumerate(members) if p.is_leq(tw_theta.pairs[i][1], nu)
            ]
            _, below_limit = _limit_on(f, c, [members[k] for k in below], budgets)
            passed, details = _bijection(
                class_limit_set, below_limit, lambda u: _restrict(u, below)
            )
            if not passed:
                details["nu"] = _label(a, nu)
                message = (
                    f"Restriction to the pairs below {_label(a, nu)} is not a bijection"
                )
                return False, message, details
        message = "Every class limit restricts bijectively below its representatives"
        return True, message, None

    def brute_force_agrees():
        try:
            reference = brute_force_limit(f, budgets)
        except BudgetExceededError as e:
            raise CheckSkipped(f"brute force over budget: {e}")
        if reference == everything:
            return True, f"Both methods find {len(everything)} families", None
        return False, "Search and brute force disagree", {
            "search": len(everything),
            "brute_force": len(reference),
        }

    engine.add_check("boundary_pullback", boundary_pullback)
    engine.add_check("action_restriction", action_restriction)
    engine.add_check("class_limit", class_limit)
    engine.add_check("restriction_below", restriction_below)
    engine.add_check("brute_force_agrees", brute_force_agrees)
    report = engine.run()
    logger.info(f"Limit below {_label(a, theta)} has {len(everything)} families")
    return report


def _compatible_families(
    pieces: List[Tuple[List[int], List[Family]]],
    related: List[Tuple[int, int]],
    budgets: Optional[Budgets],
) -> List[Tuple[Family, ...]]:
    """Choices of one family per piece agreeing on the smaller of every related pair."""
    limit = get_budgets(budgets).max_product_size
    results: List[Tuple[Family, ...]] = []
    visited = 0

    def agrees(i: int, u: Family, j: int, v: Family) -> bool:
        small, large = pieces[i][0], pieces[j][0]
        position = {x: k for k, x in enumerate(large)}
        return all(u[k] == v[position[x]] for k, x in enumerate(small))

    def search(chosen: List[Family]) -> None:
        nonlocal visited
        k = len(chosen)
        if k == len(pieces):
            results.append(tuple(chosen))
            return
        for family in pieces[k][1]:
            visited += 1
            if visited > limit:
                raise BudgetExceededError("max_product_size", limit, visited)
            below = all(
                agrees(i, chosen[i], k, family)
                for i, j in related
                if j == k and i < k
            )
            above = all(
                agrees(k, family, j, chosen[j])
                for i, j in related
                if i == k and j < k
            )
            if below and above:
                search(chosen + [family])

    search([])
    return results
