from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)
import logging

from stratakit.categories.category import FinCategory, Functor
from stratakit.checks.engine import CheckEngine, Report
from stratakit.config import Budgets
from stratakit.errors import CategoryError, DeltaConditionError
from stratakit.groups.perm_group import PermGroup
from stratakit.posets.actions import GroupAction

logger = logging.getLogger(__name__)


class DeltaFamily:
    """
    A subgroup Δ_σ of the acting group for every poset element σ.

    Valid families satisfy: each Δ_σ fixes σ; τ <= σ implies Δ_σ ⊆ Δ_τ (condition
    (i)); γΔ_σγ⁻¹ = Δ_{γ·σ} for all γ and σ (condition (ii)).
    """

    def __init__(
        self,
        action: GroupAction,
        subgroups: Sequence[Iterable[int]],
        check: bool = True,
    ):
        self.action = action
        self.subgroups: Tuple[FrozenSet[int], ...] = tuple(
            frozenset(s) for s in subgroups
        )
        if len(self.subgroups) != action.target.size:
            raise DeltaConditionError(
                f"Expected {action.target.size} subgroups, got {len(self.subgroups)}"
            )
        if check:
            self.validate()

    @classmethod
    def trivial(cls, action: GroupAction) -> "DeltaFamily":
        identity = action.group.identity_id
        return cls(action, [{identity}] * action.target.size)

    @classmethod
    def generated(
        cls, action: GroupAction, generators: Mapping[int, Iterable[int]]
    ) -> "DeltaFamily":
        """Family whose Δ_σ is generated by the given ids; unlisted elements get {e}."""
        group = action.group
        return cls(
            action,
            [group.subgroup(generators.get(x, [])) for x in range(action.target.size)],
        )

    def delta(self, x: int) -> FrozenSet[int]:
        return self.subgroups[x]

    def validate(self) -> None:
        """Raise DeltaConditionError naming the first violated condition."""
        a, group, p = self.action, self.action.group, self.action.target
        for x, sub in enumerate(self.subgroups):
            if not group.is_subgroup(sub):
                raise DeltaConditionError(
                    f"Δ of element {p.elements[x]!r} is not a subgroup"
                )
            moved = [g for g in sorted(sub) if a.act(g, x) != x]
            if moved:
                raise DeltaConditionError(
                    f"stabilizer condition: element {moved[0]} of "
                    f"Δ_{p.elements[x]!r} moves {p.elements[x]!r}"
                )
        for tau, sigma in p.relation_pairs():
            if not self.subgroups[sigma] <= self.subgroups[tau]:
                raise DeltaConditionError(
                    f"condition (i): {p.elements[tau]!r} <= {p.elements[sigma]!r} "
                    f"but Δ_{p.elements[sigma]!r} is not contained in "
                    f"Δ_{p.elements[tau]!r}"
                )
        for g in range(group.order):
            for x, sub in enumerate(self.subgroups):
                conjugated = frozenset(group.conjugate(g, h) for h in sub)
                if conjugated != self.subgroups[a.act(g, x)]:
                    raise DeltaConditionError(
                        f"condition (ii): conjugating Δ_{p.elements[x]!r} by element "
                        f"{g} does not give Δ_{p.elements[a.act(g, x)]!r}"
                    )


def _action_hom(a: GroupAction, x: int, y: int) -> List[int]:
    p = a.target
    return [g for g in range(a.group.order) if p.is_leq(a.act(g, x), y)]


def action_category(a: GroupAction, budgets: Optional[Budgets] = None) -> FinCategory:
    """Objects the poset elements; morphisms x → y the elements γ with γ·x <= y."""
    group = a.group
    return FinCategory.from_hom_function(
        a.target.elements,
        lambda x, y: _action_hom(a, x, y),
        lambda x, y, z, f, g: group.mul(g, f),
        lambda x: group.identity_id,
        name="action category",
        budgets=budgets,
    )


class _Cosets:
    """Cached cosets γΔ and Δγ with their minimal representatives."""

    def __init__(self, group: PermGroup):
        self.group = group
        self._left: Dict[Tuple[int, FrozenSet[int]], FrozenSet[int]] = {}
        self._right: Dict[Tuple[FrozenSet[int], int], FrozenSet[int]] = {}

    def gh(self, g: int, sub: FrozenSet[int]) -> FrozenSet[int]:
        key = (g, sub)
        if key not in self._left:
            self._left[key] = self.group.coset_gh(g, sub)
        return self._left[key]

    def hg(self, sub: FrozenSet[int], g: int) -> FrozenSet[int]:
        key = (sub, g)
        if key not in self._right:
            self._right[key] = self.group.coset_hg(sub, g)
        return self._right[key]

    def rep_gh(self, g: int, sub: FrozenSet[int]) -> int:
        return min(self.gh(g, sub))


def cl_category(
    a: GroupAction, d: DeltaFamily, budgets: Optional[Budgets] = None
) -> FinCategory:
    """
    Coset category of a group action and a subgroup family.

    Hom(σ, τ) is the set of cosets γΔ_σ of {γ : γ·σ <= τ}, each stored by its least
    element id. Composition multiplies representatives; independence of the choice of
    representatives is checked exhaustively for every composable pair.

    Args:
        a: A group action on a poset
        d: A valid subgroup family for a
        budgets: Optional budget override

    Returns:
        The category; raises CategoryError if composition is not well defined
    """
    if d.action is not a:
        d = DeltaFamily(a, d.subgroups)
    group = a.group
    cosets = _Cosets(group)

    def hom(x: int, y: int) -> List[int]:
        return sorted({cosets.rep_gh(g, d.delta(x)) for g in _action_hom(a, x, y)})

    def compose(x: int, y: int, z: int, f: int, g: int) -> int:
        result = cosets.rep_gh(group.mul(g, f), d.delta(x))
        for f2 in cosets.gh(f, d.delta(x)):
            for g2 in cosets.gh(g, d.delta(y)):
                if cosets.rep_gh(group.mul(g2, f2), d.delta(x)) != result:
                    names = a.target.elements
                    raise CategoryError(
                        f"Composition is not well defined on {names[x]!r} → "
                        f"{names[y]!r} → {names[z]!r}"
                    )
        return result

    return FinCategory.from_hom_function(
        a.target.elements,
        hom,
        compose,
        lambda x: cosets.rep_gh(group.identity_id, d.delta(x)),
        name="coset category",
        budgets=budgets,
    )


def orbit_category(
    group: PermGroup,
    subgroups: Sequence[FrozenSet[int]],
    labels: Optional[Sequence] = None,
    budgets: Optional[Budgets] = None,
) -> FinCategory:
    """
    Orbit category on the coset spaces Γ/H for the given subgroups.

    A morphism Γ/H → Γ/K is xH ↦ xγK, defined when γ⁻¹Hγ ⊆ K and stored by the least
    element of γK.
    """
    cosets = _Cosets(group)
    if labels is None:
        labels = [f"Γ/H{i}" for i in range(len(subgroups))]
    labels = list(labels)

    def hom(i: int, j: int) -> List[int]:
        h, k = subgroups[i], subgroups[j]
        return sorted({
            cosets.rep_gh(g, k) for g in range(group.order)
            if all(group.conjugate(group.inv(g), x) in k for x in h)
        })

    return FinCategory.from_hom_function(
        labels,
        hom,
        lambda i, j, k, f, g: cosets.rep_gh(group.mul(f, g), subgroups[k]),
        lambda i: cosets.rep_gh(group.identity_id, subgroups[i]),
        name="orbit category",
        budgets=budgets,
        check=False,
    )


def orbit_embedding_check(
    c: FinCategory, a: GroupAction, d: DeltaFamily, budgets: Optional[Budgets] = None
) -> Report:
    """
    Compare the coset category with the orbit category on the Γ/Δ_σ.

    The morphism [γ]: σ → τ is sent to the map Γ/Δ_τ → Γ/Δ_σ, xΔ_τ ↦ xγΔ_σ,
    contravariantly.

    Args:
        c: The coset category built from (a, d)
        a: The group action
        d: The subgroup family

    Returns:
        Report with checks well_defined, functorial, faithful and full
    """
    group = a.group
    orbit = orbit_category(
        group, d.subgroups, labels=a.target.elements, budgets=budgets
    )
    source = c.opposite()
    engine = CheckEngine("orbit category embedding")
    images: List[Optional[int]] = []
    undefined = []
    for f in range(source.num_morphisms):
        x, y, rep = source.morphisms[f]
        images.append(orbit.index.get((x, y, rep)))
        if images[-1] is None:
            undefined.append(f)

    def well_defined():
        if undefined:
            x, y, rep = source.morphisms[undefined[0]]
            details = {
                "morphism": [repr(source.objects[x]), repr(source.objects[y]), rep]
            }
            message = "A morphism has no counterpart in the orbit category"
            return False, message, details
        message = f"All {source.num_morphisms} morphisms map to equivariant maps"
        return True, message, None

    def functorial():
        if undefined:
            return False, "Map is not defined on every morphism", None
        f = Functor(source, orbit, range(source.num_objects), images, check=False)
        problems = f.violations()
        if problems:
            return False, problems[0], None
        return True, "Identities and composites are preserved", None

    def faithful():
        for x in range(source.num_objects):
            for y in range(source.num_objects):
                mapped = [images[f] for f in source.hom(x, y)]
                if len(set(mapped)) != len(mapped):
                    objects = [repr(source.objects[x]), repr(source.objects[y])]
                    return False, "Distinct morphisms have the same image", {
                        "objects": objects
                    }
        return True, "Hom maps are injective", None

    def full():
        for x in range(source.num_objects):
            for y in range(source.num_objects):
                mapped = {images[f] for f in source.hom(x, y)}
                extra = [m for m in orbit.hom(x, y) if m not in mapped]
                if extra:
                    return False, "Equivariant maps outside the image", {
                        "objects": [repr(source.objects[x]), repr(source.objects[y])],
                        "missing": [orbit.payload(m) for m in extra],
                    }
        return True, "Hom maps are surjective", None

    engine.add_check("well_defined", well_defined)
    engine.add_check("functorial", functorial)
    engine.add_check("faithful", faithful)
    engine.add_check("full", full)
    return engine.run()


class ObjectAutomorphisms(NamedTuple):
    group: PermGroup
    order: int
    report: Report


def object_automorphisms(
    c: FinCategory, a: GroupAction, d: DeltaFamily, x: int
) -> ObjectAutomorphisms:
    """
    Automorphism group of an object of the coset category.

    Every endomorphism of σ is invertible and Aut(σ) is Γ(σ)/Δ_σ, returned as the
    permutation group of left multiplication on the cosets of Δ_σ in Γ(σ).

    Args:
        c: The coset category built from (a, d)
        a: The group action
        d: The subgroup family
        x: Index of σ

    Returns:
        The group, its order and a report on invertibility and the index formula
    """
    group = a.group
    stabilizer = sorted(a.stabilizer(x))
    delta = d.delta(x)
    ends = c.hom(x, x)
    engine = CheckEngine(f"automorphisms of {a.target.elements[x]!r}")

    def endomorphisms_invertible():
        bad = [c.payload(f) for f in ends if not c.is_iso(f)]
        if bad:
            return False, "Non-invertible endomorphisms found", {"payloads": bad}
        return True, f"All {len(ends)} endomorphisms are invertible", None

    def delta_normal():
        bad = [
            g
            for g in stabilizer
            if frozenset(group.conjugate(g, h) for h in delta) != delta
        ]
        if bad:
            return False, "Δ is not normal in the stabilizer", {"element": bad[0]}
        return True, "Δ is normal in the stabilizer", None

    def index_formula():
        expected, remainder = divmod(len(stabilizer), len(delta))
        details = {
            "stabilizer": len(stabilizer),
            "delta": len(delta),
            "automorphisms": len(ends),
        }
        if remainder == 0 and expected == len(ends):
            return True, "|Aut| · |Δ| = |stabilizer|", details
        return False, "|Aut| · |Δ| differs from |stabilizer|", details

    engine.add_check("endomorphisms_invertible", endomorphisms_invertible)
    engine.add_check("delta_normal", delta_normal)
    engine.add_check("index_formula", index_formula)
    report = engine.run()

    reps = sorted({min(group.coset_gh(g, delta)) for g in stabilizer})
    position = {r: i for i, r in enumerate(reps)}
    perms = []
    for g in stabilizer:
        perm = tuple(
            position[min(group.coset_gh(group.mul(g, r), delta))] for r in reps
        )
        if perm not in perms:
            perms.append(perm)
    quotient = PermGroup(len(reps), perms)
    return ObjectAutomorphisms(group=quotient, order=quotient.order, report=report)
