from functools import cached_property, reduce
from itertools import product as iter_product
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)
import logging

import numpy as np

from stratakit.errors import PosetError

logger = logging.getLogger(__name__)


class FinPoset:
    """
    Finite partial order with an explicit relation.

    The relation is a read-only boolean matrix: ``leq[i, j]`` holds iff element
    i <= element j. Elements are opaque hashable labels addressed by their position.
    """

    def __init__(self, elements: Sequence[Hashable], leq: Any, check: bool = True):
        self.elements: Tuple[Hashable, ...] = tuple(elements)
        n = len(self.elements)
        matrix = np.array(leq, dtype=bool).reshape(n, n)
        matrix.setflags(write=False)
        self.leq = matrix
        if len(set(self.elements)) != len(self.elements):
            raise PosetError("Poset elements must be distinct")
        if check:
            problem = relation_problem(self.leq)
            if problem:
                raise PosetError(f"Relation is not a partial order: {problem}")

    @classmethod
    def from_pairs(
        cls, elements: Sequence[Hashable], pairs: Iterable[Tuple[int, int]]
    ) -> "FinPoset":
        """Reflexive-transitive closure of the index pairs (i, j) meaning i <= j."""
        n = len(elements)
        rel = np.eye(n, dtype=bool)
        for i, j in pairs:
            rel[i, j] = True
        while True:
            closed = rel | (rel.astype(np.int64) @ rel.astype(np.int64) > 0)
            if (closed == rel).all():
                break
            rel = closed
        return cls(elements, rel)

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls(list(range(n)), np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, n: int) -> "FinPoset":
        return cls(list(range(n)), np.eye(n, dtype=bool))

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "FinPoset":
        elements = [tuple(e) if isinstance(e, list) else e for e in data["elements"]]
        return cls(elements, data["leq"])

    def to_json(self) -> Dict[str, Any]:
        return {
            "elements": [list(e) if isinstance(e, tuple) else e for e in self.elements],
            "leq": self.leq.tolist(),
        }

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> Dict[Hashable, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def index(self, element: Hashable) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise PosetError(f"Element {element!r} not in poset")

    def is_leq(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    @cached_property
    def lt(self) -> np.ndarray:
        lt = self.leq.copy()
        lt[np.diag_indices_from(lt)] = False
        lt.setflags(write=False)
        return lt

    @cached_property
    def covers(self) -> np.ndarray:
        """covers[i, j] iff j covers i."""
        between = (self.lt.astype(np.int64) @ self.lt.astype(np.int64)) > 0
        child = self.lt & ~between
        child.setflags(write=False)
        return child

    def hasse_edges(self) -> List[Tuple[int, int]]:
        return sorted((int(i), int(j)) for i, j in zip(*np.nonzero(self.covers)))

    def relation_pairs(self) -> List[Tuple[int, int]]:
        return sorted((int(i), int(j)) for i, j in zip(*np.nonzero(self.leq)))

    def down(self, i: int) -> List[int]:
        return [int(k) for k in np.nonzero(self.leq[:, i])[0]]

    def up(self, i: int) -> List[int]:
        return [int(k) for k in np.nonzero(self.leq[i, :])[0]]

    def maximum(self) -> Optional[int]:
        tops = [i for i in range(self.size) if self.leq[:, i].all()]
        return tops[0] if tops else None

    def minimum(self) -> Optional[int]:
        bottoms = [i for i in range(self.size) if self.leq[i, :].all()]
        return bottoms[0] if bottoms else None

    def meet(self, indices: Iterable[int]) -> Optional[int]:
        """Greatest lower bound of the elements, or None when it does not exist."""
        indices = list(indices)
        lower = [i for i in range(self.size) if all(self.leq[i, x] for x in indices)]
        greatest = [i for i in lower if all(self.leq[k, i] for k in lower)]
        return greatest[0] if greatest else None

    def join(self, indices: Iterable[int]) -> Optional[int]:
        """Least upper bound of the elements, or None when it does not exist."""
        indices = list(indices)
        upper = [i for i in range(self.size) if all(self.leq[x, i] for x in indices)]
        least = [i for i in upper if all(self.leq[i, k] for k in upper)]
        return least[0] if least else None

    def induced(self, indices: Sequence[int]) -> "FinPoset":
        idx = list(indices)
        elements = [self.elements[i] for i in idx]
        return FinPoset(elements, self.leq[np.ix_(idx, idx)], check=False)

    def opposite(self) -> "FinPoset":
        return FinPoset(self.elements, self.leq.T, check=False)

    def height(self) -> int:
        """Number of elements in a longest chain."""
        longest = [1] * self.size
        for i in sorted(range(self.size), key=lambda k: len(self.up(k))):
            above = [longest[j] for j in self.up(i) if j != i]
            longest[i] = 1 + max(above, default=0)
        return max(longest, default=0)

    def __repr__(self) -> str:
        return f"FinPoset(size={self.size}, covers={len(self.hasse_edges())})"


def relation_problem(leq: np.ndarray) -> Optional[str]:
    """Describe why a boolean matrix fails to be a partial order, or None."""
    n = leq.shape[0]
    if leq.shape != (n, n):
        return "relation matrix is not square"
    if not leq.diagonal().all():
        return f"not reflexive at {int(np.nonzero(~leq.diagonal())[0][0])}"
    sym = leq & leq.T & ~np.eye(n, dtype=bool)
    if sym.any():
        i, j = (int(x) for x in np.argwhere(sym)[0])
        return f"not antisymmetric: {i} <= {j} <= {i}"
    two_step = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    missing = two_step & ~leq
    if missing.any():
        i, j = (int(x) for x in np.argwhere(missing)[0])
        return f"not transitive: {i} <= k <= {j} but not {i} <= {j}"
    return None


def product(ps: Sequence[FinPoset]) -> FinPoset:
    """Componentwise order on tuples; the empty product is the one-point poset on ()."""
    elements = list(iter_product(*(p.elements for p in ps)))
    leq = reduce(lambda a, b: np.kron(a.astype(np.int64), b.leq.astype(np.int64)) > 0,
                 ps, np.ones((1, 1), dtype=bool))
    return FinPoset(elements, leq, check=False)


def product_index(ps: Sequence[FinPoset], coords: Sequence[int]) -> int:
    """Position in product(ps) of the tuple with the given coordinate indices."""
    index = 0
    for p, c in zip(ps, coords):
        index = index * p.size + c
    return index


def downset(p: FinPoset, x: Hashable) -> FinPoset:
    """Induced order on {y : y <= x}."""
    return p.induced(p.down(p.index(x)))


def upset(p: FinPoset, x: Hashable) -> FinPoset:
    return p.induced(p.up(p.index(x)))


def is_monotone(
    f: Callable[[int], int], source: FinPoset, target: FinPoset
) -> Optional[Tuple[int, int]]:
    """First pair i <= j with f(i) not <= f(j), or None when f is monotone."""
    for i, j in source.relation_pairs():
        if not target.is_leq(f(i), f(j)):
            return i, j
    return None
