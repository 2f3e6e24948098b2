"""
Canonical labeling of decorated dual graphs.

Vertices are colored by (weight, degree, leg labels) and refined by edge multiplicities
towards each color class; individualization of one vertex of the first non-singleton
class and backtracking enumerates every ordering compatible with the refinement. The
canonical ordering is the one whose encoding is smallest, ties broken by the smallest
ordering.

Encoding (version 1): a version byte followed by the compact JSON of
``[num_vertices, weights, edges, legs]`` where weights follow the canonical vertex
order, edges are sorted pairs (a, b) with a <= b of canonical vertex positions, and legs
are sorted ``[label, position]`` pairs.
"""
from collections import Counter, defaultdict
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import json
import logging

from pydantic import BaseModel, ConfigDict

from stratakit.graphs.builders import from_edges
from stratakit.graphs.dual_graph import DualGraph, ensure_valid
from stratakit.groups.perm_group import PermGroup, compose, invert
from stratakit.errors import StratakitError

logger = logging.getLogger(__name__)

ENCODING_VERSION = 1


class CanonicalForm(BaseModel):
    """Canonical encoding of a graph and the half-edge relabeling producing it."""
    model_config = ConfigDict(frozen=True)
    encoding: bytes
    witness: Tuple[int, ...]
    vertex_order: Tuple[int, ...]

    @property
    def version(self) -> int:
        return self.encoding[0]

    def graph(self) -> DualGraph:
        """The canonically labelled graph described by the encoding."""
        return decode(self.encoding)


class Isomorphism(BaseModel):
    """Half-edge bijection g → h and the vertex bijection it induces."""
    half_edge_map: Tuple[int, ...]
    vertex_map: Tuple[int, ...]


def _adjacency(g: DualGraph) -> List[Dict[int, int]]:
    adj: List[Dict[int, int]] = [defaultdict(int) for _ in range(g.num_vertices)]
    for h, j in g.edges():
        a, b = g.half_edges[h].vertex, g.half_edges[j].vertex
        adj[a][b] += 1
        if a != b:
            adj[b][a] += 1
    return adj


def _rank(keys: Sequence) -> List[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _initial_colors(g: DualGraph) -> List[int]:
    label_of = g.label_of()
    keys = []
    for v in range(g.num_vertices):
        hs = g.half_edges_of(v)
        labels = tuple(sorted(label_of[h] for h in hs if h in label_of))
        keys.append((g.weights[v], len(hs) - len(labels), labels))
    return _rank(keys)


def _refine(colors: List[int], adj: List[Dict[int, int]]) -> List[int]:
    while True:
        keys = [
            (colors[v], tuple(sorted((colors[u], m) for u, m in adj[v].items())))
            for v in range(len(colors))
        ]
        refined = _rank(keys)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _leaves(colors: List[int], adj: List[Dict[int, int]]) -> Iterator[Tuple[int, ...]]:
    colors = _refine(colors, adj)
    counts = Counter(colors)
    if all(c == 1 for c in counts.values()):
        yield tuple(sorted(range(len(colors)), key=lambda v: colors[v]))
        return
    target = min(c for c, k in counts.items() if k > 1)
    for v in [u for u in range(len(colors)) if colors[u] == target]:
        individualized = _rank(
            [(colors[u], 0 if u == v else 1) for u in range(len(colors))]
        )
        yield from _leaves(individualized, adj)


def _layout(g: DualGraph, order: Sequence[int]) -> Tuple[bytes, Tuple[int, ...]]:
    """Encoding and half-edge witness for a given vertex ordering."""
    pos = [0] * len(order)
    for k, v in enumerate(order):
        pos[v] = k
    keyed = []
    for h, j in g.edges():
        pa, pb = pos[g.half_edges[h].vertex], pos[g.half_edges[j].vertex]
        first, second = (h, j) if pa <= pb else (j, h)
        keyed.append(((min(pa, pb), max(pa, pb)), first, second))
    keyed.sort()

    witness = [0] * g.num_half_edges
    for i, (_, first, second) in enumerate(keyed):
        witness[first] = 2 * i
        witness[second] = 2 * i + 1
    legs = sorted((label, pos[g.half_edges[h].vertex]) for label, h in g.legs.items())
    base = 2 * len(keyed)
    for k, (label, _) in enumerate(legs):
        witness[g.legs[label]] = base + k

    payload = [
        g.num_vertices,
        [g.weights[v] for v in order],
        [list(pair) for pair, _, _ in keyed],
        [list(leg) for leg in legs],
    ]
    compact = json.dumps(payload, separators=(",", ":")).encode()
    encoding = bytes([ENCODING_VERSION]) + compact
    return encoding, tuple(witness)


def _best_leaves(g: DualGraph) -> List[Tuple[bytes, Tuple[int, ...], Tuple[int, ...]]]:
    adj = _adjacency(g)
    best: List[Tuple[bytes, Tuple[int, ...], Tuple[int, ...]]] = []
    for order in _leaves(_initial_colors(g), adj):
        encoding, witness = _layout(g, order)
        if not best or encoding < best[0][0]:
            best = [(encoding, order, witness)]
        elif encoding == best[0][0]:
            best.append((encoding, order, witness))
    best.sort(key=lambda leaf: leaf[1])
    return best


def canonical_form(g: DualGraph) -> CanonicalForm:
    """
    Compute the canonical form of a graph.

    Args:
        g: A valid dual graph

    Returns:
        Form whose encoding is equal for exactly the isomorphic graphs
    """
    ensure_valid(g)
    encoding, order, witness = _best_leaves(g)[0]
    return CanonicalForm(encoding=encoding, witness=witness, vertex_order=order)


def decode(encoding: bytes) -> DualGraph:
    if not encoding or encoding[0] != ENCODING_VERSION:
        raise StratakitError(f"Unsupported canonical encoding version {encoding[:1]!r}")
    nv, weights, edges, legs = json.loads(encoding[1:].decode())
    if len(weights) != nv:
        raise StratakitError("Corrupt canonical encoding: weight count mismatch")
    return from_edges(
        weights, [tuple(e) for e in edges], {label: p for label, p in legs}
    )


def is_isomorphic(g: DualGraph, h: DualGraph) -> Optional[Isomorphism]:
    """An isomorphism g → h preserving weights, involution and marking, if any."""
    if g.leg_labels != h.leg_labels:
        return None
    if g.num_half_edges != h.num_half_edges or g.num_vertices != h.num_vertices:
        return None
    fg, fh = canonical_form(g), canonical_form(h)
    if fg.encoding != fh.encoding:
        return None
    half_edge_map = compose(invert(fh.witness), fg.witness)
    pos_g = {v: k for k, v in enumerate(fg.vertex_order)}
    vertex_map = tuple(fh.vertex_order[pos_g[v]] for v in range(g.num_vertices))
    return Isomorphism(half_edge_map=half_edge_map, vertex_map=vertex_map)


def _edge_local_generators(g: DualGraph) -> Tuple[List[Tuple[int, ...]], int]:
    """Generators and order of the automorphisms fixing every vertex."""
    n = g.num_half_edges
    classes: Dict[Tuple[int, int], List[Tuple[int, int]]] = defaultdict(list)
    for h, j in g.edges():
        a, b = g.half_edges[h].vertex, g.half_edges[j].vertex
        if a <= b:
            classes[(a, b)].append((h, j))
        else:
            classes[(b, a)].append((j, h))

    gens: List[Tuple[int, ...]] = []
    size = 1
    for (a, b), edges in sorted(classes.items()):
        m = len(edges)
        size *= factorial(m) * (2 ** m if a == b else 1)
        for (x1, y1), (x2, y2) in zip(edges, edges[1:]):
            p = list(range(n))
            p[x1], p[x2], p[y1], p[y2] = x2, x1, y2, y1
            gens.append(tuple(p))
        if a == b:
            for x, y in edges:
                p = list(range(n))
                p[x], p[y] = y, x
                gens.append(tuple(p))
    return gens, size


def automorphism_counts(g: DualGraph) -> Tuple[int, int]:
    """
    (number of vertex automorphisms, number of edge-local symmetries); |Aut| is their
    product.
    """
    ensure_valid(g)
    return len(_best_leaves(g)), _edge_local_generators(g)[1]


def automorphism_group(g: DualGraph) -> PermGroup:
    """
    Automorphisms of g as half-edge permutations.

    Every automorphism fixes each leg and commutes with the involution.

    Args:
        g: A valid dual graph

    Returns:
        Group generated by the vertex automorphisms lifted through canonical witnesses
        and by parallel-edge permutations and loop flips
    """
    ensure_valid(g)
    leaves = _best_leaves(g)
    base = invert(leaves[0][2])
    gens = [compose(base, witness) for _, _, witness in leaves[1:]]
    local, local_size = _edge_local_generators(g)
    group = PermGroup(g.num_half_edges, gens + local)
    expected = len(leaves) * local_size
    if group.order != expected:
        raise StratakitError(
            f"Automorphism group has order {group.order}, expected {expected}"
        )
    logger.debug(
        f"Automorphism group of order {group.order} on {g.num_half_edges} half-edges"
    )
    return group


def is_automorphism(g: DualGraph, p: Sequence[int]) -> bool:
    """
    Whether a half-edge permutation preserves owners up to a vertex bijection, and
    preserves ι, weights and legs.
    """
    n = g.num_half_edges
    if sorted(p) != list(range(n)):
        return False
    if any(p[g.involution[h]] != g.involution[p[h]] for h in range(n)):
        return False
    if any(p[h] != h for h in g.legs.values()):
        return False
    vmap: Dict[int, int] = {}
    for h in range(n):
        a, b = g.half_edges[h].vertex, g.half_edges[p[h]].vertex
        if vmap.setdefault(a, b) != b:
            return False
    if len(set(vmap.values())) != len(vmap):
        return False
    return all(g.weights[a] == g.weights[b] for a, b in vmap.items())
