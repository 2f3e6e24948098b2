from math import gcd
from typing import Dict, List, Tuple
import logging

from pydantic import BaseModel
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from stratakit.config import Budgets, get_budgets
from stratakit.errors import BudgetExceededError, PosetError, StratakitError
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)

Matrix = List[List[int]]


class HomologyResult(BaseModel):
    """Reduced integral homology of an order complex, degrees 0..max_dim."""
    max_dim: int
    betti: List[int]
    torsion: List[List[int]]
    simplices: List[int]
    truncated: bool = False

    @property
    def is_trivial(self) -> bool:
        return not any(self.betti) and not any(self.torsion)


def smith_diagonal(matrix: Matrix) -> List[int]:
    """
    Nonzero invariant factors of an integer matrix, in divisibility order.

    Exact integer elimination, pivoting on the entry of smallest absolute value.
    """
    a = [list(row) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    diagonal: List[int] = []
    t = 0
    while t < min(m, n):
        entries = [
            (abs(a[i][j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if a[i][j]
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            if not rest:
                break
            _, ri, rj = min(rest)
            if rj == t:
                a[t], a[ri] = a[ri], a[t]
            else:
                for row in a:
                    row[t], row[rj] = row[rj], row[t]
        diagonal.append(abs(a[t][t]))
        t += 1
    return _invariant_factors(diagonal)


def _invariant_factors(diagonal: List[int]) -> List[int]:
    d = sorted(diagonal)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


def rational_rank(matrix: Matrix) -> int:
    if not matrix or not matrix[0]:
        return 0
    rows = [[QQ(x) for x in row] for row in matrix]
    dm = DomainMatrix(rows, (len(matrix), len(matrix[0])), QQ)
    return int(dm.rank())


def order_complex_chains(
    p: FinPoset, max_len: int, budgets: Budgets = None
) -> List[List[Tuple[int, ...]]]:
    """
    Chains of p by length, up to max_len elements.

    Chains are increasing tuples of element indices, grown by depth-first search over
    strict successors with memoized tails.
    """
    limit = get_budgets(budgets).max_simplices
    memo: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}

    def tails(x: int, length: int) -> List[Tuple[int, ...]]:
        key = (x, length)
        if key not in memo:
            if length == 1:
                memo[key] = [(x,)]
            else:
                memo[key] = [
                    (x,) + rest
                    for y in p.up(x)
                    if y != x
                    for rest in tails(y, length - 1)
                ]
        return memo[key]

    by_length: List[List[Tuple[int, ...]]] = []
    total = 0
    for length in range(1, max_len + 1):
        chains = sorted(c for x in range(p.size) for c in tails(x, length))
        total += len(chains)
        if total > limit:
            raise BudgetExceededError("max_simplices", limit, total)
        if not chains:
            break
        by_length.append(chains)
    return by_length


def _boundary(faces: List[Tuple[int, ...]], simplices: List[Tuple[int, ...]]) -> Matrix:
    index = {f: i for i, f in enumerate(faces)}
    matrix = [[0] * len(simplices) for _ in faces]
    for j, s in enumerate(simplices):
        for k in range(len(s)):
            matrix[index[s[:k] + s[k + 1:]]][j] += (-1) ** k
    return matrix


def order_complex_homology(p: FinPoset, max_dim: int, truncate: bool = False,
                           budgets: Budgets = None) -> HomologyResult:
    """
    Reduced integral homology of the order complex of p.

    Args:
        p: The poset
        max_dim: Highest degree to report
        truncate: Acknowledge that p has chains longer than max_dim + 1 elements
        budgets: Optional budget override

    Returns:
        Betti numbers and torsion coefficients in degrees 0..max_dim
    """
    if max_dim < 0:
        raise PosetError(f"max_dim must be nonnegative, got {max_dim}")
    chains = order_complex_chains(p, max_dim + 3, budgets)
    truncated = len(chains) > max_dim + 1
    if truncated and not truncate:
        raise PosetError(
            f"Poset has chains with more than {max_dim + 1} elements; "
            f"pass truncate=True to report degrees up to {max_dim} only"
        )

    def cells(k: int) -> List[Tuple[int, ...]]:
        return chains[k] if 0 <= k < len(chains) else []

    # boundaries[k]: C_k -> C_{k-1}; the augmentation C_0 -> Z gives reduced homology.
    boundaries: Dict[int, Matrix] = {}
    vertices = cells(0)
    boundaries[0] = [[1] * len(vertices)] if vertices else []
    for k in range(1, max_dim + 2):
        boundaries[k] = _boundary(cells(k - 1), cells(k)) if cells(k) else []

    ranks: Dict[int, int] = {}
    factors: Dict[int, List[int]] = {}
    for k, matrix in boundaries.items():
        factors[k] = smith_diagonal(matrix) if matrix and matrix[0] else []
        ranks[k] = len(factors[k])
        if ranks[k] != rational_rank(matrix):
            raise StratakitError(
                f"Smith normal form rank disagrees with rational rank in degree {k}"
            )

    betti, torsion = [], []
    for k in range(max_dim + 1):
        betti.append(len(cells(k)) - ranks[k] - ranks.get(k + 1, 0))
        torsion.append([d for d in factors.get(k + 1, []) if d > 1])
    logger.debug(f"Order complex homology of a {p.size}-element poset: betti={betti}")
    return HomologyResult(
        max_dim=max_dim,
        betti=betti,
        torsion=torsion,
        simplices=[len(c) for c in chains],
        truncated=truncated,
    )
