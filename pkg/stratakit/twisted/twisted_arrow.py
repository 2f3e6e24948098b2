from typing import Dict, FrozenSet, List, Literal, NamedTuple, Optional, Tuple
import logging

from pydantic import BaseModel, model_validator

from stratakit.categories.category import (
    FinCategory,
    Functor,
    check_equivalence,
    comma_category,
    poset_category,
)
from stratakit.categories.coset_category import DeltaFamily, cl_category
from stratakit.checks.engine import CheckEngine, Report, merge_reports
from stratakit.config import Budgets
from stratakit.errors import CategoryError, StratakitError
from stratakit.posets.actions import GroupAction

logger = logging.getLogger(__name__)


class TwCategory(NamedTuple):
    """
    A twisted arrow category with the pair (σ, τ) of base objects behind each object.

    In standard mode ``base`` is the category whose arrows are the objects, in the order
    of its morphisms; in alternative mode ``pairs[i]`` is the pair σ <= τ of poset
    elements.
    """
    category: FinCategory
    pairs: Tuple[Tuple[int, int], ...]
    mode: str
    base: Optional[FinCategory] = None

    def object_of_pair(self, sigma: int, tau: int) -> int:
        try:
            return self.pairs.index((sigma, tau))
        except ValueError:
            raise StratakitError(
                f"No object ({sigma} <= {tau}) in {self.category.name}"
            )


def tw_standard(c: FinCategory, budgets: Optional[Budgets] = None) -> TwCategory:
    """
    Twisted arrow category of a finite category.

    Objects are the morphisms f of c. A morphism f → f′ is a pair (a, b) of morphisms of
    c with f′ = b∘f∘a, and (a, b) followed by (a′, b′) is (a∘a′, b′∘b).

    Args:
        c: A valid finite category
        budgets: Optional budget override

    Returns:
        The twisted arrow category; payloads are pairs of morphism positions of c
    """
    def hom(f: int, f2: int) -> List[Tuple[int, int]]:
        x, y, _ = c.morphisms[f]
        x2, y2, _ = c.morphisms[f2]
        return [
            (a, b)
            for a in c.hom(x2, x)
            for b in c.hom(y, y2)
            if c.compose(c.compose(a, f), b) == f2
        ]

    def compose(
        f: int, f2: int, f3: int, first: Tuple[int, int], second: Tuple[int, int]
    ) -> Tuple[int, int]:
        (a, b), (a2, b2) = first, second
        return c.compose(a2, a), c.compose(b, b2)

    category = FinCategory.from_hom_function(
        [(c.objects[x], c.objects[y], p) for x, y, p in c.morphisms],
        hom,
        compose,
        lambda f: (c.identities[c.src(f)], c.identities[c.tgt(f)]),
        name=f"twisted arrows of {c.name}",
        budgets=budgets,
        check=False,
    )
    return TwCategory(
        category=category,
        pairs=tuple((x, y) for x, y, _ in c.morphisms),
        mode="standard",
        base=c,
    )


def tw_alternative(
    a: GroupAction, d: DeltaFamily, budgets: Optional[Budgets] = None
) -> TwCategory:
    """
    Twisted arrow category of the coset category, on pairs σ <= τ.

    Hom((σ <= τ), (σ′ <= τ′)) is the set of right cosets Δ_τ·γ of
    {γ : γ·σ′ <= σ, γ·τ′ >= τ}, stored by their least element id; [γ] followed by [δ]
    is [γδ].
    """
    group, p = a.group, a.target
    pairs = [(s, t) for s in range(p.size) for t in range(p.size) if p.is_leq(s, t)]
    reps: Dict[Tuple[FrozenSet[int], int], int] = {}

    def rep(sub: FrozenSet[int], g: int) -> int:
        key = (sub, g)
        if key not in reps:
            reps[key] = min(group.coset_hg(sub, g))
        return reps[key]

    def hom(i: int, j: int) -> List[int]:
        (s, t), (s2, t2) = pairs[i], pairs[j]
        delta = d.delta(t)
        return sorted({
            rep(delta, g) for g in range(group.order)
            if p.is_leq(a.act(g, s2), s) and p.is_leq(t, a.act(g, t2))
        })

    def compose(i: int, j: int, k: int, f: int, g: int) -> int:
        delta = d.delta(pairs[i][1])
        result = rep(delta, group.mul(f, g))
        for g2 in group.coset_hg(d.delta(pairs[j][1]), g):
            if rep(delta, group.mul(f, g2)) != result:
                s, t = pairs[i]
                raise CategoryError(
                    f"Twisted composition is not well defined on "
                    f"{p.elements[s]!r} <= {p.elements[t]!r}"
                )
        return result

    category = FinCategory.from_hom_function(
        [(p.elements[s], p.elements[t]) for s, t in pairs],
        hom,
        compose,
        lambda i: rep(d.delta(pairs[i][1]), group.identity_id),
        name="twisted arrows of the coset category",
        budgets=budgets,
    )
    return TwCategory(category=category, pairs=tuple(pairs), mode="alternative")


def comparison_functor(
    alternative: TwCategory, standard: TwCategory, a: GroupAction, d: DeltaFamily
) -> Functor:
    """
    The functor from the pair description to the twisted arrows of the coset category.

    (σ <= τ) goes to the arrow [id]: σ → τ, and [γ]: (σ <= τ) → (σ′ <= τ′) goes to the
    pair ([γ]: σ′ → σ, [γ⁻¹]: τ → τ′).

    Args:
        alternative: tw_alternative(a, d)
        standard: tw_standard(cl_category(a, d))
        a: The group action
        d: The subgroup family

    Returns:
        The functor, unchecked; check_equivalence and Functor.violations examine it
    """
    if (
        alternative.mode != "alternative"
        or standard.mode != "standard"
        or standard.base is None
    ):
        raise StratakitError(
            "comparison_functor expects an alternative and a standard twisted arrow "
            "category"
        )
    group, cl = a.group, standard.base

    def arrow(x: int, y: int, g: int) -> int:
        key = (x, y, min(group.coset_gh(g, d.delta(x))))
        if key not in cl.index:
            names = a.target.elements
            raise CategoryError(
                f"No morphism {names[x]!r} → {names[y]!r} for element {g}"
            )
        return cl.index[key]

    object_map = [arrow(s, t, group.identity_id) for s, t in alternative.pairs]
    morphism_map = []
    for i, j, g in alternative.category.morphisms:
        (s, t), (s2, t2) = alternative.pairs[i], alternative.pairs[j]
        pair = (arrow(s2, s, g), arrow(t, t2, group.inv(g)))
        key = (object_map[i], object_map[j], pair)
        morphism_map.append(standard.category.index[key])
    return Functor(
        alternative.category, standard.category, object_map, morphism_map, check=False
    )


def equivalence_report(f: Functor, subject: str) -> Report:
    """Functoriality followed by the equivalence checks of f."""
    engine = CheckEngine(subject)

    def functorial():
        problems = f.violations()
        if problems:
            return False, problems[0], None
        return True, "Identities and composites are preserved", None

    engine.add_check("functorial", functorial)
    reports = [engine.run(), check_equivalence(f, subject)]
    return merge_reports(subject, reports, prefix=False)


def twisted_comparison_report(
    a: GroupAction, d: DeltaFamily, budgets: Optional[Budgets] = None
) -> Report:
    """Build both descriptions and check that the comparison is an equivalence."""
    standard = tw_standard(cl_category(a, d, budgets=budgets), budgets=budgets)
    alternative = tw_alternative(a, d, budgets=budgets)
    f = comparison_functor(alternative, standard, a, d)
    return equivalence_report(f, "twisted arrow descriptions")


def comma_equivalence_check(
    a: GroupAction, d: DeltaFamily, sigma: int, cl: Optional[FinCategory] = None
) -> Report:
    """
    Compare the poset over σ with the coset category over σ.

    The functor sends τ <= σ to the object (τ, [id]: τ → σ) of the comma category of the
    identity functor over σ.

    Args:
        a: The group action
        d: The subgroup family
        sigma: Index of σ
        cl: The coset category of (a, d), built when omitted

    Returns:
        Report with checks functorial, essentially_surjective and fully_faithful
    """
    p = a.target
    cl = cl if cl is not None else cl_category(a, d)
    below = p.down(sigma)
    poset_comma = poset_category(
        p.induced(below), name=f"poset over {p.elements[sigma]!r}"
    )
    comma, _ = comma_category(Functor.identity(cl), sigma)

    def identity_arrow(x: int, y: int) -> int:
        return cl.index[(x, y, min(d.delta(x)))]

    object_map = [
        comma.object_index((cl.objects[t], identity_arrow(t, sigma))) for t in below
    ]
    morphism_map = []
    for i, j, _ in poset_comma.morphisms:
        u = identity_arrow(below[i], below[j])
        morphism_map.append(comma.index[(object_map[i], object_map[j], u)])
    f = Functor(poset_comma, comma, object_map, morphism_map, check=False)
    return equivalence_report(f, f"comma categories over {p.elements[sigma]!r}")


class TwFilter(BaseModel):
    """
    Selects a full subcategory of the twisted arrows on pairs.

    kind theta keeps τ <= θ; leq_class also needs σ <= ν′ for some ν′ in the orbit of ν;
    eq_class further needs τ <= ν′ for some ν′ in that orbit; action_cat keeps the pairs
    (σ <= θ); b_gamma keeps (θ <= θ).
    """
    kind: Literal["theta", "leq_class", "eq_class", "action_cat", "b_gamma"]
    theta: int
    nu: Optional[int] = None

    @model_validator(mode="after")
    def _needs_nu(self) -> "TwFilter":
        if self.kind in ("leq_class", "eq_class") and self.nu is None:
            raise ValueError(f"filter {self.kind} needs an orbit representative nu")
        return self


def filter_objects(tw: TwCategory, a: GroupAction, filt: TwFilter) -> List[int]:
    """Object positions of tw kept by the filter."""
    if tw.mode != "alternative":
        raise StratakitError(
            "Filters apply to the pair description of the twisted arrows"
        )
    p = a.target
    theta = filt.theta
    if not 0 <= theta < p.size:
        raise StratakitError(f"invalid filter: theta {theta} is not a poset element")
    orbit: List[int] = []
    if filt.nu is not None:
        if not 0 <= filt.nu < p.size:
            raise StratakitError(
                f"invalid filter: nu {filt.nu} is not a poset element"
            )
        orbit = a.orbit(filt.nu)
        if not any(p.is_leq(mu, theta) for mu in orbit):
            raise StratakitError(
                f"invalid filter: the orbit of {p.elements[filt.nu]!r} is not below "
                f"{p.elements[theta]!r}"
            )

    def keep(s: int, t: int) -> bool:
        if filt.kind == "b_gamma":
            return s == theta and t == theta
        if filt.kind == "action_cat":
            return t == theta
        if not p.is_leq(t, theta):
            return False
        if filt.kind == "theta":
            return True
        if not any(p.is_leq(s, mu) for mu in orbit):
            return False
        return filt.kind == "leq_class" or any(p.is_leq(t, mu) for mu in orbit)

    return [i for i, (s, t) in enumerate(tw.pairs) if keep(s, t)]


def subcategory(
    tw: TwCategory, a: GroupAction, filt: TwFilter
) -> Tuple[TwCategory, Functor]:
    """
    The full subcategory selected by a filter, with its inclusion functor.

    Returns:
        The subcategory in pair form and the inclusion into tw.category
    """
    members = filter_objects(tw, a, filt)
    p = a.target
    label = f"{filt.kind} at {p.elements[filt.theta]!r}"
    if filt.nu is not None:
        label += f", class of {p.elements[filt.nu]!r}"
    sub, inclusion = tw.category.full_subcategory(members, name=label)
    logger.debug(
        f"Subcategory {label}: {sub.num_objects} objects, {sub.num_morphisms} morphisms"
    )
    pairs = tuple(tw.pairs[i] for i in members)
    return TwCategory(category=sub, pairs=pairs, mode=tw.mode), inclusion
