from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple
import logging

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict

from stratakit.checks.monitor import record_enumeration
from stratakit.config import Budgets, get_budgets
from stratakit.errors import BudgetExceededError, StratakitError
from stratakit.graphs.builders import from_edges
from stratakit.graphs.canonical import CanonicalForm, automorphism_group, canonical_form
from stratakit.graphs.dual_graph import (
    DualGraph,
    contract,
    ensure_valid,
    genus,
    is_stable,
    one_vertex_graph,
    underlying_multigraph,
)
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)


class StratumClass(BaseModel):
    """One isomorphism class of stable graphs with its canonical representative."""
    model_config = ConfigDict(frozen=True)
    id: int
    form: CanonicalForm
    graph: DualGraph
    edge_count: int


class StratumTable(BaseModel):
    """All isomorphism classes of stable genus-g graphs with legs labelled by P."""
    genus: int
    labels: Tuple[str, ...]
    classes: List[StratumClass]
    index: Dict[bytes, int]

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def max_edges(self) -> int:
        return 3 * self.genus - 3 + len(self.labels)

    def class_of(self, g: DualGraph) -> int:
        """Class id of a graph of this type."""
        if g.leg_labels != frozenset(self.labels) or genus(g) != self.genus:
            raise StratakitError(
                f"Graph of type ({genus(g)}, {sorted(g.leg_labels)}) does not belong "
                f"to ({self.genus}, {list(self.labels)})"
            )
        encoding = canonical_form(g).encoding
        if encoding not in self.index:
            raise StratakitError("Graph is not stable or missing from the table")
        return self.index[encoding]

    def counts_by_codimension(self) -> List[int]:
        counts = [0] * (self.max_edges + 1)
        for c in self.classes:
            counts[c.edge_count] += 1
        return counts

    def to_json(self) -> Dict:
        return {
            "genus": self.genus,
            "legs": list(self.labels),
            "classes": [
                {
                    "id": c.id,
                    "edge_count": c.edge_count,
                    "graph": c.graph.model_dump(mode="json"),
                }
                for c in self.classes
            ],
        }


def check_type(genus_: int, labels: Iterable[str]) -> Tuple[int, Tuple[str, ...]]:
    """Validate a type (g, P); stable curves exist iff 2g - 2 + |P| > 0."""
    legs = tuple(sorted(set(labels)))
    if genus_ < 0:
        raise StratakitError(f"Genus must be nonnegative, got {genus_}")
    if 2 * genus_ - 2 + len(legs) <= 0:
        raise StratakitError(
            f"No stable curves of genus {genus_} with {len(legs)} marked points: "
            f"2g-2+|P| <= 0"
        )
    return genus_, legs


def _with_loop(g: DualGraph, v: int) -> DualGraph:
    n = g.num_half_edges
    weights = list(g.weights)
    weights[v] -= 1
    owners = list(g.owners) + [v, v]
    return DualGraph.build(weights, owners, list(g.involution) + [n + 1, n], g.legs)


def _split(g: DualGraph, v: int, keep_weight: int, moved: FrozenSet[int]) -> DualGraph:
    n, new = g.num_half_edges, g.num_vertices
    weights = list(g.weights)
    weights[v] = keep_weight
    weights.append(g.weights[v] - keep_weight)
    owners = [new if h in moved else o for h, o in enumerate(g.owners)] + [v, new]
    return DualGraph.build(weights, owners, list(g.involution) + [n + 1, n], g.legs)


def inverse_contractions(g: DualGraph) -> Iterator[DualGraph]:
    """
    Stable graphs with one more edge that contract onto g along that edge.

    A positive-weight vertex may trade one unit of weight for a loop; any vertex may
    split into two stable vertices joined by a new edge, sharing its weight and its
    half-edges. Of the two mirror-image splits of a vertex only one is produced.
    """
    for v in range(g.num_vertices):
        w = g.weights[v]
        if w > 0:
            yield _with_loop(g, v)
        here = g.half_edges_of(v)
        for size in range(len(here) + 1):
            for stay in combinations(here, size):
                moved = tuple(h for h in here if h not in stay)
                for a in range(w + 1):
                    b = w - a
                    stable_a = 2 * a - 2 + len(stay) + 1 > 0
                    stable_b = 2 * b - 2 + len(moved) + 1 > 0
                    if not (stable_a and stable_b):
                        continue
                    if (a, stay) > (b, moved):
                        continue
                    yield _split(g, v, a, frozenset(moved))


def enumerate_strata(
    genus_: int, labels: Iterable[str], budgets: Optional[Budgets] = None
) -> StratumTable:
    """
    Enumerate every isomorphism class of stable genus-g graphs with legs P.

    Generation starts at the one-vertex graph and applies inverse contractions level by
    level (one edge more per level) until no new class appears; classes are deduplicated
    by canonical encoding and numbered in sorted encoding order.

    Args:
        genus_: Genus g
        labels: Leg labels P
        budgets: Optional budget override; max_canonical_forms bounds the search

    Returns:
        The complete table of classes
    """
    genus_, legs = check_type(genus_, labels)
    limit = get_budgets(budgets).max_canonical_forms
    root = one_vertex_graph(genus_, legs)
    forms: Dict[bytes, Tuple[CanonicalForm, int]] = {}
    computed = 0

    root_form = canonical_form(root)
    forms[root_form.encoding] = (root_form, 0)
    frontier = [root_form.graph()]
    level = 0
    while frontier:
        level += 1
        found: List[DualGraph] = []
        for g in frontier:
            for candidate in inverse_contractions(g):
                computed += 1
                if computed > limit:
                    raise BudgetExceededError("max_canonical_forms", limit, computed)
                form = canonical_form(candidate)
                if form.encoding not in forms:
                    forms[form.encoding] = (form, level)
                    found.append(form.graph())
        logger.debug(
            f"Level {level} of ({genus_}, {list(legs)}): {len(found)} new classes"
        )
        frontier = found

    classes = [
        StratumClass(id=i, form=form, graph=form.graph(), edge_count=edges)
        for i, (form, edges) in enumerate(forms[k] for k in sorted(forms))
    ]
    table = StratumTable(
        genus=genus_,
        labels=legs,
        classes=classes,
        index={c.form.encoding: c.id for c in classes},
    )
    record_enumeration(genus_, legs, len(classes), computed + 1)
    logger.info(f"Enumerated {len(classes)} classes of type ({genus_}, {list(legs)})")
    return table


def _same_type(a: DualGraph, b: DualGraph) -> None:
    ensure_valid(a)
    ensure_valid(b)
    if a.leg_labels != b.leg_labels:
        raise StratakitError(
            f"Label mismatch: {sorted(a.leg_labels)} != {sorted(b.leg_labels)}"
        )
    if genus(a) != genus(b):
        raise StratakitError(f"Genus mismatch: {genus(a)} != {genus(b)}")


def specialisation_leq(a: DualGraph, b: DualGraph) -> bool:
    """
    Whether b is isomorphic to a contraction of a.

    Only edge subsets of size |E(a)| - |E(b)| can contract a onto b.
    """
    _same_type(a, b)
    k = a.num_edges - b.num_edges
    if k < 0:
        return False
    target = canonical_form(b).encoding
    for chosen in combinations(a.edges(), k):
        contracted = contract(a, [h for e in chosen for h in e]).graph
        if canonical_form(contracted).encoding == target:
            return True
    return False


def edge_orbits(g: DualGraph) -> List[List[Tuple[int, int]]]:
    """Edges grouped into sorted Aut(g)-orbits, orbits ordered by their first edge."""
    group = automorphism_group(g)
    edges = g.edges()
    remaining = set(edges)
    orbits = []
    for h, j in edges:
        if (h, j) not in remaining:
            continue
        orbit = set()
        for p in group.elements:
            x, y = p[h], p[j]
            orbit.add((min(x, y), max(x, y)))
        remaining -= orbit
        orbits.append(sorted(orbit))
    return orbits


def single_edge_contractions(a: DualGraph, table: StratumTable) -> List[int]:
    """Classes obtained by contracting one edge of a, one edge per Aut(a)-orbit."""
    return sorted(
        {table.class_of(contract(a, list(orbit[0])).graph) for orbit in edge_orbits(a)}
    )


def specialisation_upset(a: DualGraph, table: StratumTable) -> Set[int]:
    """Ids of every class of the table that is a contraction of a."""
    result = set()
    edges = a.edges()
    for k in range(len(edges) + 1):
        for chosen in combinations(edges, k):
            contracted = contract(a, [h for e in chosen for h in e]).graph
            result.add(table.class_of(contracted))
    return result


def build_poset(table: StratumTable) -> FinPoset:
    """
    The specialisation poset on class ids.

    The relation comes from contracting every edge subset of every representative; its
    Hasse covers are then compared with the single-edge-orbit contractions.

    Args:
        table: A complete stratum table

    Returns:
        Poset whose elements are the class ids, i <= j iff class j is a contraction of
        class i
    """
    n = len(table)
    leq = np.zeros((n, n), dtype=bool)
    covers = np.zeros((n, n), dtype=bool)
    for c in table.classes:
        for j in specialisation_upset(c.graph, table):
            leq[c.id, j] = True
        for j in single_edge_contractions(c.graph, table):
            covers[c.id, j] = True
    poset = FinPoset(list(range(n)), leq)
    if not (poset.covers == covers).all():
        diff = [(int(i), int(j)) for i, j in np.argwhere(poset.covers != covers)]
        raise StratakitError(
            f"Single-edge contractions differ from the Hasse covers at {diff[:5]}"
        )
    logger.info(
        f"Built specialisation poset of ({table.genus}, {list(table.labels)}) "
        f"with {len(poset.hasse_edges())} covers"
    )
    return poset


def _vertex_iso(a: Tuple, b: Tuple) -> bool:
    """
    Brute-force isomorphism of (weights, edge multiset, legs) triples over vertex
    bijections.
    """
    weights_a, edges_a, legs_a = a
    weights_b, edges_b, legs_b = b
    target = sorted(edges_b)
    for perm in permutations(range(len(weights_a))):
        if any(weights_a[v] != weights_b[perm[v]] for v in range(len(perm))):
            continue
        if any(perm[legs_a[label]] != legs_b[label] for label in legs_a):
            continue
        moved = sorted(
            (min(perm[x], perm[y]), max(perm[x], perm[y])) for x, y in edges_a
        )
        if moved == target:
            return True
    return False


def brute_force_strata(genus_: int, labels: Iterable[str]) -> List[DualGraph]:
    """
    Independent enumeration of the same classes by raw search.

    Every weight vector, multiset of vertex pairs and leg placement with the right genus
    is built, filtered for connectivity and stability, and deduplicated by pairwise
    isomorphism over vertex bijections. No canonical forms are used.
    """
    genus_, legs = check_type(genus_, labels)
    reps: Dict[Tuple, List[Tuple]] = {}
    graphs: List[DualGraph] = []
    for nv in range(1, 2 * genus_ - 2 + len(legs) + 1):
        pairs = [(x, y) for x in range(nv) for y in range(x, nv)]
        for weights in product(range(genus_ + 1), repeat=nv):
            ne = genus_ - 1 + nv - sum(weights)
            if ne < 0 or ne > 3 * genus_ - 3 + len(legs):
                continue
            for edges in combinations_with_replacement(pairs, ne):
                for placement in product(range(nv), repeat=len(legs)):
                    leg_map = dict(zip(legs, placement))
                    g = from_edges(list(weights), list(edges), leg_map)
                    connected = nx.is_connected(underlying_multigraph(g))
                    if not connected or not is_stable(g):
                        continue
                    leg_counts = tuple(sorted(placement.count(v) for v in range(nv)))
                    key = (tuple(sorted(weights)), ne, leg_counts)
                    data = (tuple(weights), tuple(edges), leg_map)
                    bucket = reps.setdefault(key, [])
                    if any(_vertex_iso(data, other) for other in bucket):
                        continue
                    bucket.append(data)
                    graphs.append(g)
    logger.debug(
        f"Brute-force search found {len(graphs)} classes of type "
        f"({genus_}, {list(legs)})"
    )
    return graphs
