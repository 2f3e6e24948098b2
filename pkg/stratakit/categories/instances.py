"""
Group, poset and subgroup-family data for the coset category constructions.

Instance files are JSON objects::

    {"group": {"degree": 4, "generators": [[1, 0, 3, 2], ...]},
     "poset": {"elements": [...], "leq": [[true, false, ...], ...]},
     "action": [[image of each element under generator 0], ...],
     "delta": {"<element label>": [group element ids generating the subgroup], ...}}

Delta element ids refer to the sorted element list of the group; elements missing from
"delta" get the trivial subgroup.
"""
from itertools import combinations
from typing import Any, Dict, FrozenSet, List, NamedTuple, Sequence, Tuple
import json
import logging
import random

from pydantic import BaseModel, Field

from stratakit.categories.coset_category import DeltaFamily
from stratakit.errors import StratakitError
from stratakit.groups.perm_group import PermGroup, compose
from stratakit.posets.actions import GroupAction
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)


class GroupSpec(BaseModel):
    degree: int = Field(ge=0)
    generators: List[List[int]] = []


class PosetSpec(BaseModel):
    elements: List[Any]
    leq: List[List[bool]]


class InstanceSpec(BaseModel):
    """Schema of an instance file."""
    group: GroupSpec
    poset: PosetSpec
    action: List[List[int]]
    delta: Dict[str, List[int]] = {}


class CLInstance(NamedTuple):
    name: str
    action: GroupAction
    delta: DeltaFamily

    @property
    def group(self) -> PermGroup:
        return self.action.group

    @property
    def poset(self) -> FinPoset:
        return self.action.target

    def element(self, label: Any) -> int:
        """Index of a poset element given by its label or its label's string form."""
        p = self.poset
        for i, e in enumerate(p.elements):
            if e == label or str(e) == str(label):
                return i
        raise StratakitError(f"Element {label!r} not in the instance poset")

    def to_json(self) -> Dict[str, Any]:
        group, p = self.group, self.poset
        gens = group.generator_ids()
        return {
            "group": group.to_json(),
            "poset": p.to_json(),
            "action": [list(self.action.table[g]) for g in gens],
            "delta": {
                str(p.elements[x]): sorted(self.delta.delta(x)) for x in range(p.size)
            },
        }


def load_instance(data: Dict[str, Any], name: str = "instance") -> CLInstance:
    """
    Build an instance from parsed JSON.

    Args:
        data: Parsed instance file; validated against InstanceSpec
        name: Name used in reports

    Returns:
        The instance; invalid subgroup families raise DeltaConditionError
    """
    spec = InstanceSpec.model_validate(data)
    group = PermGroup(spec.group.degree, spec.group.generators)
    elements = [tuple(e) if isinstance(e, list) else e for e in spec.poset.elements]
    poset = FinPoset(elements, spec.poset.leq)
    action = GroupAction.from_generators(
        group, poset, spec.action, generators=spec.group.generators
    )
    labels = {str(e): i for i, e in enumerate(poset.elements)}
    unknown = sorted(set(spec.delta) - set(labels))
    if unknown:
        raise StratakitError(f"delta names unknown elements {unknown}")
    for key, ids in spec.delta.items():
        bad = [i for i in ids if not 0 <= i < group.order]
        if bad:
            raise StratakitError(
                f"delta.{key}: element ids {bad} out of range for a group of order "
                f"{group.order}"
            )
    delta = DeltaFamily.generated(action, {labels[k]: v for k, v in spec.delta.items()})
    return CLInstance(name=name, action=action, delta=delta)


def read_instance(path: str) -> CLInstance:
    with open(path) as f:
        return load_instance(json.load(f), name=path)


def subset_label(s: FrozenSet[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(s)) + "}"


def _signed_group(
    n: int, base_generators: Sequence[Sequence[int]]
) -> Tuple[PermGroup, List[int]]:
    """Signed permutations on 2n points; the i-th flip swaps points i and i + n."""
    lifted = [tuple(list(p) + [p[i] + n for i in range(n)]) for p in base_generators]
    flips = []
    for i in range(n):
        q = list(range(2 * n))
        q[i], q[i + n] = i + n, i
        flips.append(tuple(q))
    group = PermGroup(2 * n, lifted + flips)
    return group, [group.index(f) for f in flips]


def twist_instance(
    n: int,
    base_generators: Sequence[Sequence[int]],
    family: Sequence[FrozenSet[int]],
    name: str = "twist instance",
) -> CLInstance:
    """
    Subset family under reverse inclusion acted on by signed permutations.

    The family must be closed under the base permutations. σ <= τ iff τ ⊆ σ, and Δ_σ is
    generated by the flips of the points of σ.
    """
    family = sorted({frozenset(s) for s in family}, key=lambda s: (len(s), sorted(s)))
    group, flips = _signed_group(n, base_generators)
    position = {s: i for i, s in enumerate(family)}
    leq = [[t <= s for t in family] for s in family]
    poset = FinPoset([subset_label(s) for s in family], leq)

    def act(g: int, x: int) -> int:
        perm = group.element(g)
        image = frozenset(perm[i] % n for i in family[x])
        if image not in position:
            raise StratakitError(
                f"Family is not closed under the group: {subset_label(image)} missing"
            )
        return position[image]

    action = GroupAction.from_function(group, poset, act)
    generators = {x: [flips[i] for i in s] for x, s in enumerate(family)}
    delta = DeltaFamily.generated(action, generators)
    return CLInstance(name=name, action=action, delta=delta)


def subsets_instance() -> CLInstance:
    """All subsets of {1,2} under reverse inclusion, acted on by a group of order 8."""
    family = [frozenset(s) for k in range(3) for s in combinations(range(2), k)]
    return twist_instance(2, [(1, 0)], family, name="subsets of {1,2}")


def down_closure(faces: Sequence[FrozenSet[int]]) -> List[FrozenSet[int]]:
    result = set()
    for face in faces:
        for k in range(len(face) + 1):
            result.update(frozenset(s) for s in combinations(sorted(face), k))
    return sorted(result, key=lambda s: (len(s), sorted(s)))


def _orbit_closure(
    faces: Sequence[FrozenSet[int]], generators: Sequence[Sequence[int]]
) -> List[FrozenSet[int]]:
    found = set(faces)
    frontier = list(found)
    while frontier:
        nxt = []
        for s in frontier:
            for p in generators:
                image = frozenset(p[i] for i in s)
                if image not in found:
                    found.add(image)
                    nxt.append(image)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def random_twist_instance(rng: random.Random) -> CLInstance:
    """
    A random twist instance with group order at most 24 and at most 8 poset elements.

    The family is the down-closure of the orbits of a few random faces, so it is closed
    under unions of families with a common lower bound.
    """
    n = rng.randint(1, 3)
    choices: List[List[Tuple[int, ...]]] = [[]]
    if n >= 2:
        choices.append([tuple([1, 0] + list(range(2, n)))])
    if n == 3:
        choices.append([(1, 2, 0)])
    base = rng.choice(choices)
    faces = [
        frozenset(i for i in range(n) if rng.random() < 0.5)
        for _ in range(rng.randint(1, 2))
    ]
    family = down_closure(_orbit_closure(faces, base))
    return twist_instance(n, base, family, name=f"random twist instance on {n} points")


def random_subset_action(
    rng: random.Random, max_degree: int = 4, max_elements: int = 10
) -> GroupAction:
    """
    A random permutation group of degree <= 4 acting on a family of <= 10 subsets
    ordered by inclusion.
    """
    n = rng.randint(1, max_degree)
    candidates: List[List[Tuple[int, ...]]] = [[]]
    if n >= 2:
        swap = tuple([1, 0] + list(range(2, n)))
        cycle = tuple(list(range(1, n)) + [0])
        candidates += [[swap], [cycle], [swap, cycle]]
    generators = rng.choice(candidates)
    family: List[FrozenSet[int]] = []
    for _ in range(rng.randint(1, 6)):
        seed = frozenset(i for i in range(n) if rng.random() < 0.5)
        orbit = _orbit_closure([seed], generators)
        if len(set(family) | set(orbit)) <= max_elements:
            family = sorted(set(family) | set(orbit), key=lambda s: (len(s), sorted(s)))
    if not family:
        family = [frozenset()]
    group = PermGroup(n, generators)
    position = {s: i for i, s in enumerate(family)}
    leq = [[s <= t for t in family] for s in family]
    poset = FinPoset([subset_label(s) for s in family], leq)

    def act(g: int, x: int) -> int:
        perm = group.element(g)
        return position[frozenset(perm[i] for i in family[x])]

    return GroupAction.from_function(group, poset, act)


def z4_singleton_instance() -> CLInstance:
    """Z/4 acting trivially on one element, with Δ the subgroup of index 2."""
    group = PermGroup.cyclic(4)
    r = group.generators[0]
    poset = FinPoset(["*"], [[True]])
    action = GroupAction.trivial(group, poset)
    delta = DeltaFamily.generated(action, {0: [group.index(compose(r, r))]})
    return CLInstance(name="Z/4 singleton", action=action, delta=delta)


def join_free_instance() -> CLInstance:
    """
    Trivial group on a poset where two elements have two maximal common lower bounds.

    s < a, b < t, n < T with a, b both below t and n, so t and n have no meet.
    """
    elements = ["s", "a", "b", "t", "n", "T"]
    pairs = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)]
    poset = FinPoset.from_pairs(elements, pairs)
    group = PermGroup.trivial()
    action = GroupAction.trivial(group, poset)
    delta = DeltaFamily.trivial(action)
    return CLInstance(name="join-free counterexample", action=action, delta=delta)

