from itertools import product as iter_product
from typing import Dict, Hashable, List, Optional, Sequence, Set, Tuple
import logging
import random

import networkx as nx

from stratakit.categories.category import FinCategory, Functor
from stratakit.config import Budgets, get_budgets
from stratakit.errors import BudgetExceededError, CategoryError

logger = logging.getLogger(__name__)

Family = Tuple[int, ...]


class SetValuedFunctor:
    """
    A functor from a finite category to finite sets.

    ``sets[x]`` lists the elements of F(x); ``maps[m][i]`` is the index in F(target) of
    the image of the i-th element of F(source).
    """

    def __init__(
        self,
        category: FinCategory,
        sets: Sequence[Sequence[Hashable]],
        maps: Sequence[Sequence[int]],
        check: bool = True,
    ):
        self.category = category
        self.sets: Tuple[Tuple[Hashable, ...], ...] = tuple(tuple(s) for s in sets)
        self.maps: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(int(i) for i in m) for m in maps
        )
        if check:
            problems = self.violations()
            if problems:
                raise CategoryError(
                    f"Invalid set-valued functor on {category.name}: {problems[0]}"
                )

    @classmethod
    def constant(cls, category: FinCategory, size: int) -> "SetValuedFunctor":
        return cls(
            category,
            [list(range(size))] * category.num_objects,
            [list(range(size))] * category.num_morphisms,
        )

    @classmethod
    def representable(cls, category: FinCategory, x: int) -> "SetValuedFunctor":
        """Hom(x, −), acting by postcomposition."""
        sets = [category.hom(x, y) for y in range(category.num_objects)]
        position = [{f: i for i, f in enumerate(s)} for s in sets]
        maps = []
        for m, (y, z, _) in enumerate(category.morphisms):
            maps.append([position[z][category.compose(f, m)] for f in sets[y]])
        return cls(category, sets, maps)

    @classmethod
    def representable_quotient(
        cls, category: FinCategory, x: int, automorphisms: Sequence[int]
    ) -> "SetValuedFunctor":
        """
        Hom(x, −)/H, where H is the group generated by the given automorphisms of x
        acting by precomposition. Elements are the orbits {f∘h : h in H}, labelled by
        their least member.
        """
        group = {category.identity(x)}
        frontier = list(group)
        while frontier:
            h = frontier.pop()
            for a in automorphisms:
                endo = category.src(a) == x and category.tgt(a) == x
                if not endo or not category.is_iso(a):
                    raise CategoryError(
                        f"Morphism {a} is not an automorphism of object {x}"
                    )
                k = category.compose(a, h)
                if k not in group:
                    group.add(k)
                    frontier.append(k)

        def orbit(f: int) -> int:
            return min(category.compose(h, f) for h in group)

        sets = [
            sorted({orbit(f) for f in category.hom(x, y)})
            for y in range(category.num_objects)
        ]
        position = [{f: i for i, f in enumerate(s)} for s in sets]
        maps = []
        for m, (y, z, _) in enumerate(category.morphisms):
            maps.append(
                [position[z][orbit(category.compose(f, m))] for f in sets[y]]
            )
        return cls(category, sets, maps)

    @classmethod
    def coproduct(cls, functors: Sequence["SetValuedFunctor"]) -> "SetValuedFunctor":
        """Objectwise disjoint union; elements are (summand, element) pairs."""
        if not functors:
            raise CategoryError("Coproduct needs at least one summand")
        c = functors[0].category
        if any(f.category is not c for f in functors):
            raise CategoryError("Summands of a coproduct must share their category")
        sets = [
            [(k, e) for k, f in enumerate(functors) for e in f.sets[x]]
            for x in range(c.num_objects)
        ]
        maps = []
        for m, (x, y, _) in enumerate(c.morphisms):
            offsets = [
                sum(g.size(y) for g in functors[:k]) for k in range(len(functors))
            ]
            maps.append(
                [offsets[k] + i for k, f in enumerate(functors) for i in f.maps[m]]
            )
        return cls(c, sets, maps)

    def size(self, x: int) -> int:
        return len(self.sets[x])

    def violations(self) -> List[str]:
        c = self.category
        if len(self.sets) != c.num_objects or len(self.maps) != c.num_morphisms:
            return ["sets or maps do not cover the category"]
        problems = []
        for m, (x, y, _) in enumerate(c.morphisms):
            in_range = all(0 <= i < self.size(y) for i in self.maps[m])
            if len(self.maps[m]) != self.size(x) or not in_range:
                problems.append(
                    f"map of morphism {m} is not a function F(source) → F(target)"
                )
        if problems:
            return problems
        for x, i in enumerate(c.identities):
            if self.maps[i] != tuple(range(self.size(x))):
                problems.append(f"identity of object {x} does not act as the identity")
        for (f, g), h in c.composition.items():
            if any(
                self.maps[g][self.maps[f][i]] != self.maps[h][i]
                for i in range(self.size(c.src(f)))
            ):
                problems.append(f"composite of {f} and {g} is not preserved")
                break
        return problems

    def restrict(self, inclusion: Functor) -> "SetValuedFunctor":
        """Precompose with a functor into this functor's category."""
        source = inclusion.source
        return SetValuedFunctor(
            source,
            [self.sets[inclusion.obj(x)] for x in range(source.num_objects)],
            [self.maps[inclusion.mor(m)] for m in range(source.num_morphisms)],
            check=False,
        )


def limit_set(f: SetValuedFunctor, budgets: Optional[Budgets] = None) -> List[Family]:
    """
    Compatible families of a set-valued functor.

    A family picks x_c in F(c) for every object c with F(m)(x_source) = x_target for
    every morphism m. Objects are assigned in order; each assignment forces the values
    along outgoing morphisms, and conflicting branches are cut.

    Args:
        f: A valid set-valued functor
        budgets: Optional budget override; max_product_size bounds the search nodes

    Returns:
        The families as tuples of element indices, in lexicographic order
    """
    c = f.category
    n = c.num_objects
    limit = get_budgets(budgets).max_product_size
    if any(f.size(x) == 0 for x in range(n)):
        return []
    outgoing = [
        [(m, c.tgt(m)) for m in c.outgoing(x) if m != c.identities[x]]
        for x in range(n)
    ]
    results: List[Family] = []
    visited = 0

    def propagate(assignment: Dict[int, int], x: int) -> bool:
        stack = [x]
        while stack:
            y = stack.pop()
            for m, z in outgoing[y]:
                value = f.maps[m][assignment[y]]
                if z in assignment:
                    if assignment[z] != value:
                        return False
                else:
                    assignment[z] = value
                    stack.append(z)
        return True

    def search(assignment: Dict[int, int]) -> None:
        nonlocal visited
        free = next((x for x in range(n) if x not in assignment), None)
        if free is None:
            results.append(tuple(assignment[x] for x in range(n)))
            return
        for value in range(f.size(free)):
            visited += 1
            if visited > limit:
                raise BudgetExceededError("max_product_size", limit, visited)
            trial = dict(assignment)
            trial[free] = value
            if propagate(trial, free):
                search(trial)

    search({})
    results.sort()
    logger.debug(
        f"Limit over {c.name}: {len(results)} families after {visited} search nodes"
    )
    return results


def brute_force_limit(
    f: SetValuedFunctor, budgets: Optional[Budgets] = None
) -> List[Family]:
    """Compatible families by filtering the full product of the sets."""
    c = f.category
    limit = get_budgets(budgets).max_product_size
    total = 1
    for x in range(c.num_objects):
        total *= f.size(x)
        if total > limit:
            raise BudgetExceededError("max_product_size", limit, total)
    candidates = iter_product(*(range(f.size(x)) for x in range(c.num_objects)))
    return sorted(
        family
        for family in candidates
        if all(
            f.maps[m][family[s]] == family[t] for m, (s, t, _) in enumerate(c.morphisms)
        )
    )


def clamp_functor(c: FinCategory, sizes: Sequence[int]) -> SetValuedFunctor:
    """
    F(x) = {0, ..., k_x - 1} with F(m)(i) = min(i, k_target - 1).

    Valid when k never increases along a morphism and no morphism leaves an empty set.
    """
    maps = []
    for x, y, _ in c.morphisms:
        if sizes[x] > 0 and sizes[y] == 0:
            raise CategoryError("A morphism leaves a nonempty set for an empty one")
        maps.append([min(i, sizes[y] - 1) for i in range(sizes[x])])
    return SetValuedFunctor(c, [list(range(k)) for k in sizes], maps)


def random_set_functor(
    c: FinCategory, rng: random.Random, max_size: int = 4, empty_rate: float = 0.1
) -> SetValuedFunctor:
    """
    A random functor with at most max_size elements at every object.

    Usually the disjoint union of a quotient of a representable functor, by a random
    group of automorphisms of its object, with a clamp functor; sometimes one of the two
    alone.

    Args:
        c: A finite category
        rng: Source of randomness
        max_size: Bound on every set
        empty_rate: Chance per object of emptying it together with its predecessors

    Returns:
        A valid set-valued functor on c
    """
    n = c.num_objects
    quotient = None
    if n and rng.random() < 0.75:
        x = rng.randrange(n)
        automorphisms = [
            h for h in c.hom(x, x) if h != c.identity(x) and c.is_iso(h)
        ]
        candidate = SetValuedFunctor.representable_quotient(
            c, x, [h for h in automorphisms if rng.random() < 0.5]
        )
        if all(candidate.size(y) <= max_size for y in range(n)):
            quotient = candidate
    if quotient is not None:
        room = max_size - max(quotient.size(y) for y in range(n))
        if room == 0 or rng.random() < 0.25:
            return quotient
        clamp = _random_clamp(c, rng, room, empty_rate)
        return SetValuedFunctor.coproduct([quotient, clamp])
    return _random_clamp(c, rng, max_size, empty_rate)


def _random_clamp(
    c: FinCategory, rng: random.Random, max_size: int, empty_rate: float
) -> SetValuedFunctor:
    """
    Empty values are closed under predecessors; the size at x is the least draw among
    the nonempty objects reaching x, so sizes never increase along morphisms.
    """
    n = c.num_objects
    reach = nx.DiGraph()
    reach.add_nodes_from(range(n))
    reach.add_edges_from((s, t) for s, t, _ in c.morphisms if s != t)
    empty: Set[int] = set()
    for x in range(n):
        if rng.random() < empty_rate:
            empty |= nx.ancestors(reach, x) | {x}
    draws = [rng.randint(1, max_size) for _ in range(n)]
    sizes = []
    for x in range(n):
        if x in empty:
            sizes.append(0)
            continue
        reaching = (nx.ancestors(reach, x) | {x}) - empty
        sizes.append(min(draws[z] for z in reaching))
    return clamp_functor(c, sizes)
