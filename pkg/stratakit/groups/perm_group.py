from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging

from sympy.combinatorics import Permutation, PermutationGroup

from stratakit.config import get_budgets
from stratakit.errors import GroupTooLargeError, StratakitError

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]


def compose(p: Perm, q: Perm) -> Perm:
    """Product p·q acting as p(q(i)): q is applied first."""
    return tuple(p[i] for i in q)


def invert(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def is_permutation(p: Sequence[int], degree: int) -> bool:
    return len(p) == degree and sorted(p) == list(range(degree))


class PermGroup:
    """
    Finite permutation group on {0, ..., degree-1} given by generators.

    Elements, when enumerated, are sorted lexicographically by their array form; element
    ids are positions in that list, so the identity always has id 0.
    """

    def __init__(self, degree: int, generators: Iterable[Sequence[int]],
                 max_elements: Optional[int] = None):
        if degree < 0:
            raise StratakitError(
                f"Permutation degree must be nonnegative, got {degree}"
            )
        gens = []
        for g in generators:
            g = tuple(int(x) for x in g)
            if not is_permutation(g, degree):
                raise StratakitError(
                    f"Generator {list(g)} is not a permutation of degree {degree}"
                )
            if g != identity_perm(degree) and g not in gens:
                gens.append(g)
        self.degree = degree
        self.generators: Tuple[Perm, ...] = tuple(gens)
        if max_elements is None:
            max_elements = get_budgets().max_group_elements
        self.max_elements = max_elements
        self._mul_cache: Dict[Tuple[int, int], int] = {}

    @classmethod
    def trivial(cls, degree: int = 0) -> "PermGroup":
        return cls(degree, [])

    @classmethod
    def cyclic(cls, n: int) -> "PermGroup":
        return cls(n, [tuple((i + 1) % n for i in range(n))] if n > 1 else [])

    @classmethod
    def symmetric(cls, n: int) -> "PermGroup":
        gens = []
        if n > 1:
            gens.append(tuple([1, 0] + list(range(2, n))))
        if n > 2:
            gens.append(tuple(list(range(1, n)) + [0]))
        return cls(n, gens)

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "PermGroup":
        return cls(int(data["degree"]), data.get("generators", []))

    def to_json(self) -> Dict[str, Any]:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators]}

    @cached_property
    def order(self) -> int:
        if not self.generators:
            return 1
        group = PermutationGroup([Permutation(list(g)) for g in self.generators])
        return int(group.order())

    @cached_property
    def elements(self) -> Tuple[Perm, ...]:
        if self.order > self.max_elements:
            raise GroupTooLargeError(
                f"Group of order {self.order} exceeds the element budget "
                f"{self.max_elements}"
            )
        found = self._closure(self.generators)
        if len(found) != self.order:
            raise StratakitError(
                f"Closure found {len(found)} elements, expected order {self.order}"
            )
        logger.debug(f"Enumerated {len(found)} elements of degree {self.degree}")
        return tuple(sorted(found))

    @cached_property
    def _ids(self) -> Dict[Perm, int]:
        return {p: i for i, p in enumerate(self.elements)}

    def _closure(self, gens: Sequence[Perm]) -> set:
        identity = identity_perm(self.degree)
        found = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = compose(g, p)
                    if q not in found:
                        found.add(q)
                        nxt.append(q)
            frontier = nxt
        return found

    @property
    def identity(self) -> Perm:
        return identity_perm(self.degree)

    @property
    def identity_id(self) -> int:
        return self._ids[self.identity]

    def __len__(self) -> int:
        return self.order

    def element(self, i: int) -> Perm:
        return self.elements[i]

    def index(self, p: Sequence[int]) -> int:
        try:
            return self._ids[tuple(p)]
        except KeyError:
            raise StratakitError(
                f"Permutation {list(p)} is not an element of the group"
            )

    def contains(self, p: Sequence[int]) -> bool:
        return tuple(p) in self._ids

    def mul(self, i: int, j: int) -> int:
        """Id of elements[i]·elements[j] (elements[j] applied first)."""
        key = (i, j)
        if key not in self._mul_cache:
            product = compose(self.elements[i], self.elements[j])
            self._mul_cache[key] = self._ids[product]
        return self._mul_cache[key]

    def inv(self, i: int) -> int:
        return self._ids[invert(self.elements[i])]

    def conjugate(self, g: int, h: int) -> int:
        """Id of g·h·g⁻¹."""
        return self.mul(self.mul(g, h), self.inv(g))

    def generator_ids(self) -> List[int]:
        return [self._ids[g] for g in self.generators]

    def subgroup(self, generator_ids: Iterable[int]) -> FrozenSet[int]:
        """Element ids of the subgroup generated by the given elements."""
        gens = [self.elements[i] for i in generator_ids]
        return frozenset(self._ids[p] for p in self._closure(gens))

    def is_subgroup(self, ids: Iterable[int]) -> bool:
        ids = frozenset(ids)
        if self.identity_id not in ids:
            return False
        return all(self.mul(a, b) in ids for a in ids for b in ids)

    def coset_gh(self, g: int, subgroup: Iterable[int]) -> FrozenSet[int]:
        """g·H as element ids."""
        return frozenset(self.mul(g, h) for h in subgroup)

    def coset_hg(self, subgroup: Iterable[int], g: int) -> FrozenSet[int]:
        """H·g as element ids."""
        return frozenset(self.mul(h, g) for h in subgroup)

    def __repr__(self) -> str:
        return (
            f"PermGroup(degree={self.degree}, generators={len(self.generators)}, "
            f"order={self.order})"
        )
