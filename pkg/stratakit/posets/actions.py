from typing import (
    Callable,
    Dict,
    FrozenSet,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)
import logging

import numpy as np

from stratakit.errors import PosetError, QuotientOrderError
from stratakit.groups.perm_group import PermGroup
from stratakit.posets.poset import FinPoset, relation_problem

logger = logging.getLogger(__name__)


class GroupAction:
    """
    Action of a finite permutation group on a finite poset by automorphisms.

    ``table[g][x]`` is the index of g·x, for g an element id of the group and x an
    element index.
    """

    def __init__(
        self,
        group: PermGroup,
        target: FinPoset,
        table: Sequence[Sequence[int]],
        check: bool = True,
    ):
        self.group = group
        self.target = target
        self.table: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(int(y) for y in row) for row in table
        )
        if check:
            problems = self.violations()
            if problems:
                raise PosetError(f"Invalid group action: {problems[0]}")

    @classmethod
    def from_generators(
        cls,
        group: PermGroup,
        target: FinPoset,
        images: Sequence[Sequence[int]],
        generators: Optional[Sequence[Sequence[int]]] = None,
    ) -> "GroupAction":
        """
        Extend the action of each generator multiplicatively to the whole group.

        Args:
            group: The acting group
            target: The poset acted on
            images: For every generator (in order), the image index of each element
            generators: The permutations the rows belong to; defaults to the group
                generators

        Returns:
            The action; raises PosetError when the images do not define a homomorphism
        """
        if generators is None:
            ids = group.generator_ids()
        else:
            ids = [group.index(p) for p in generators]
        if len(images) != len(ids):
            raise PosetError(f"Expected {len(ids)} generator rows, got {len(images)}")
        n = target.size
        gens = list(zip(ids, [tuple(int(y) for y in row) for row in images]))
        for gid, row in gens:
            if sorted(row) != list(range(n)):
                raise PosetError(f"Generator {gid} does not act by a bijection")
        table: Dict[int, Tuple[int, ...]] = {group.identity_id: tuple(range(n))}
        frontier = [group.identity_id]
        while frontier:
            nxt = []
            for e in frontier:
                for gid, row in gens:
                    prod = group.mul(gid, e)
                    image = tuple(row[table[e][x]] for x in range(n))
                    if prod not in table:
                        table[prod] = image
                        nxt.append(prod)
                    elif table[prod] != image:
                        raise PosetError(
                            "Generator images do not define a group action"
                        )
            frontier = nxt
        return cls(group, target, [table[g] for g in range(group.order)])

    @classmethod
    def from_function(cls, group: PermGroup, target: FinPoset,
                      act: Callable[[int, int], int]) -> "GroupAction":
        table = [[act(g, x) for x in range(target.size)] for g in range(group.order)]
        return cls(group, target, table)

    @classmethod
    def trivial(cls, group: PermGroup, target: FinPoset) -> "GroupAction":
        return cls(group, target, [list(range(target.size))] * group.order)

    def act(self, g: int, x: int) -> int:
        return self.table[g][x]

    def violations(self) -> List[str]:
        problems = []
        n = self.target.size
        if len(self.table) != self.group.order:
            return [
                f"table has {len(self.table)} rows for a group of order "
                f"{self.group.order}"
            ]
        if self.table[self.group.identity_id] != tuple(range(n)):
            problems.append("identity does not act trivially")
        for g, row in enumerate(self.table):
            if sorted(row) != list(range(n)):
                problems.append(f"element {g} does not act by a bijection")
                continue
            moved = self.target.leq[np.ix_(row, row)]
            if not (moved == self.target.leq).all():
                problems.append(f"element {g} is not a poset automorphism")
        if problems:
            return problems
        for g in range(self.group.order):
            for h in range(self.group.order):
                gh = self.table[self.group.mul(g, h)]
                if any(gh[x] != self.table[g][self.table[h][x]] for x in range(n)):
                    problems.append(
                        f"action of {g}·{h} differs from composing the actions"
                    )
                    return problems
        return problems

    def orbit(self, x: int) -> List[int]:
        return sorted({row[x] for row in self.table})

    def orbits(self) -> List[List[int]]:
        """Orbits ordered by their minimal element index."""
        seen, result = set(), []
        for x in range(self.target.size):
            if x not in seen:
                orb = self.orbit(x)
                seen.update(orb)
                result.append(orb)
        return result

    def stabilizer(self, x: int) -> FrozenSet[int]:
        return frozenset(g for g, row in enumerate(self.table) if row[x] == x)

    def representative(self, x: int) -> int:
        return self.orbit(x)[0]


class Quotient(NamedTuple):
    poset: FinPoset
    projection: Tuple[int, ...]
    orbits: Tuple[Tuple[int, ...], ...]


def quotient_by_action(a: GroupAction) -> Quotient:
    """
    Orbit poset of a group action.

    Orbits are ordered by their minimal element and labelled by the label of that
    element; [x] <= [y] iff g·x <= y for some g. The relation is checked to be a partial
    order.

    Args:
        a: A valid group action

    Returns:
        The orbit poset, the projection element index → orbit index, and the orbits
    """
    orbits = a.orbits()
    n, k = a.target.size, len(orbits)
    projection = [0] * n
    indicator = np.zeros((k, n), dtype=np.int64)
    for i, orb in enumerate(orbits):
        for x in orb:
            projection[x] = i
            indicator[i, x] = 1
    relation = (indicator @ a.target.leq.astype(np.int64) @ indicator.T) > 0
    problem = relation_problem(relation)
    if problem:
        raise QuotientOrderError(f"Orbit relation is not a partial order: {problem}")
    labels = [a.target.elements[orb[0]] for orb in orbits]
    poset = FinPoset(labels, relation, check=False)
    logger.debug(
        f"Quotient of {n} elements by a group of order {a.group.order}: {k} orbits"
    )
    return Quotient(
        poset=poset,
        projection=tuple(projection),
        orbits=tuple(tuple(o) for o in orbits),
    )


def projection_problem(a: GroupAction, q: Quotient) -> Optional[str]:
    """Check that the projection is monotone and surjective with orbits as fibres."""
    p = a.target
    for i, j in p.relation_pairs():
        if not q.poset.is_leq(q.projection[i], q.projection[j]):
            return f"projection not monotone on {i} <= {j}"
    if set(q.projection) != set(range(q.poset.size)):
        return "projection is not surjective"
    for c, orb in enumerate(q.orbits):
        fibre = [x for x in range(p.size) if q.projection[x] == c]
        if fibre != a.orbit(orb[0]):
            return f"fibre over {c} is not an orbit"
    return None
