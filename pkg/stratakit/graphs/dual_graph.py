from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple
import json
import logging
import random

import networkx as nx
from pydantic import BaseModel, ConfigDict, field_validator

from stratakit.config import get_budgets
from stratakit.errors import InvalidGraphError

logger = logging.getLogger(__name__)


class Vertex(BaseModel):
    """A vertex of a dual graph; the weight is the genus of the component."""
    model_config = ConfigDict(frozen=True)
    weight: int


class HalfEdge(BaseModel):
    """A half-edge, owned by one vertex."""
    model_config = ConfigDict(frozen=True)
    vertex: int


class DualGraph(BaseModel):
    """
    A P-pointed dual graph.

    Half-edges carry all structure: the involution pairs them into edges, its fixed
    points are the legs, and ``legs`` labels every leg by a string. Vertex identity is
    derived from the half-edge owners.
    """
    model_config = ConfigDict(frozen=True)
    vertices: Tuple[Vertex, ...]
    half_edges: Tuple[HalfEdge, ...]
    involution: Tuple[int, ...]
    legs: Dict[str, int] = {}

    @field_validator("legs")
    @classmethod
    def _sort_legs(cls, v: Dict[str, int]) -> Dict[str, int]:
        return dict(sorted(v.items()))

    @classmethod
    def build(
        cls,
        weights: Sequence[int],
        owners: Sequence[int],
        involution: Sequence[int],
        legs: Optional[Mapping[str, int]] = None,
    ) -> "DualGraph":
        return cls(
            vertices=tuple(Vertex(weight=w) for w in weights),
            half_edges=tuple(HalfEdge(vertex=o) for o in owners),
            involution=tuple(involution),
            legs=dict(legs or {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "DualGraph":
        return cls.model_validate_json(text)

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=indent)

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(v.weight for v in self.vertices)

    @property
    def owners(self) -> Tuple[int, ...]:
        return tuple(h.vertex for h in self.half_edges)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_half_edges(self) -> int:
        return len(self.half_edges)

    @property
    def leg_labels(self) -> FrozenSet[str]:
        return frozenset(self.legs)

    def is_leg(self, h: int) -> bool:
        return self.involution[h] == h

    def half_edges_of(self, v: int) -> List[int]:
        return [h for h, e in enumerate(self.half_edges) if e.vertex == v]

    def valence(self, v: int) -> int:
        """n_v: number of half-edges at v, legs included, loops counted twice."""
        return sum(1 for e in self.half_edges if e.vertex == v)

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as half-edge pairs (h, ι(h)) with h < ι(h)."""
        return [(h, j) for h, j in enumerate(self.involution) if h < j]

    def loops(self) -> List[Tuple[int, int]]:
        owners = self.owners
        return [(h, j) for h, j in self.edges() if owners[h] == owners[j]]

    @property
    def num_edges(self) -> int:
        return len(self.edges())

    def label_of(self) -> Dict[int, str]:
        """Inverse of the marking: leg half-edge → label."""
        return {h: label for label, h in self.legs.items()}


class Violation(BaseModel):
    field: str
    message: str


class ValidationReport(BaseModel):
    valid: bool
    violations: List[Violation] = []

    def fields(self) -> List[str]:
        return [v.field for v in self.violations]


class EdgeSet(BaseModel):
    """An ι-closed set of non-leg half-edges."""
    model_config = ConfigDict(frozen=True)
    half_edge_ids: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, g: DualGraph, half_edge_ids: Iterable[int]) -> "EdgeSet":
        ids = frozenset(int(h) for h in half_edge_ids)
        for h in sorted(ids):
            if not 0 <= h < g.num_half_edges:
                raise InvalidGraphError(f"Edge set contains unknown half-edge {h}")
            if g.is_leg(h):
                raise InvalidGraphError(f"Edge set contains leg {h}")
            if g.involution[h] not in ids:
                raise InvalidGraphError(
                    f"Edge set is not closed under the involution at half-edge {h}"
                )
        return cls(half_edge_ids=ids)

    @classmethod
    def from_edges(cls, g: DualGraph, edges: Iterable[Tuple[int, int]]) -> "EdgeSet":
        return cls.of(g, [h for e in edges for h in e])


def validate(g: DualGraph) -> ValidationReport:
    """
    Check every dual graph invariant.

    Args:
        g: The graph to check

    Returns:
        Report listing each violated invariant by field
    """
    violations: List[Violation] = []
    n = g.num_half_edges
    nv = g.num_vertices
    max_weight = get_budgets().max_weight

    def add(field: str, message: str) -> None:
        violations.append(Violation(field=field, message=message))

    if nv == 0:
        add("vertices", "graph has no vertices")
    for v, w in enumerate(g.weights):
        if w < 0:
            add("weight", f"vertex {v} has negative weight {w}")
        elif w > max_weight:
            add("weight", f"vertex {v} weight {w} exceeds {max_weight}")
    for h, o in enumerate(g.owners):
        if not 0 <= o < nv:
            add("half_edges", f"half-edge {h} owned by unknown vertex {o}")

    structure_ok = True
    if len(g.involution) != n:
        add("involution", f"involution has length {len(g.involution)}, expected {n}")
        structure_ok = False
    elif any(not 0 <= j < n for j in g.involution):
        add("involution", "involution maps outside the half-edges")
        structure_ok = False
    else:
        bad = [h for h, j in enumerate(g.involution) if g.involution[j] != h]
        if bad:
            add("involution", f"involution is not self-inverse at half-edges {bad}")
            structure_ok = False

    if structure_ok:
        fixed = {h for h, j in enumerate(g.involution) if h == j}
        marked = list(g.legs.values())
        if len(set(marked)) != len(marked):
            add("marking", "marking is not injective")
        for label, h in g.legs.items():
            if h not in fixed:
                add("marking", f"label {label!r} marks non-leg half-edge {h}")
        unlabelled = sorted(fixed - set(marked))
        if unlabelled:
            add("marking", f"legs {unlabelled} carry no label")

    owners_ok = not any(v.field == "half_edges" for v in violations)
    if structure_ok and nv > 0 and owners_ok:
        if not nx.is_connected(underlying_multigraph(g)):
            add("connected", "underlying graph is not connected")

    return ValidationReport(valid=not violations, violations=violations)


def ensure_valid(g: DualGraph) -> DualGraph:
    report = validate(g)
    if not report.valid:
        summary = "; ".join(f"{v.field}: {v.message}" for v in report.violations)
        raise InvalidGraphError(f"Invalid dual graph: {summary}", report.violations)
    return g


def underlying_multigraph(g: DualGraph) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(g.num_vertices))
    for h, j in g.edges():
        graph.add_edge(g.half_edges[h].vertex, g.half_edges[j].vertex, key=h)
    return graph


def genus(g: DualGraph) -> int:
    """1 − χ(G) + Σ g_v with χ(G) = |V| − |E|."""
    ensure_valid(g)
    return 1 - (g.num_vertices - g.num_edges) + sum(g.weights)


def is_stable(g: DualGraph) -> bool:
    ensure_valid(g)
    return all(2 * w - 2 + g.valence(v) > 0 for v, w in enumerate(g.weights))


def dimension(g: DualGraph) -> int:
    """Dimension of the stratum: 3g − 3 + |P| minus the number of edges."""
    return 3 * genus(g) - 3 + len(g.legs) - g.num_edges


class Contraction(BaseModel):
    """A contracted graph with the relabeling from the original."""
    graph: DualGraph
    vertex_map: Tuple[int, ...]
    half_edge_map: Dict[int, int]


def contract(g: DualGraph, edges: Iterable[int]) -> Contraction:
    """
    Collapse the edges of an edge set.

    Vertices of the result are the connected components of (V, I) ordered by their
    minimal original vertex; surviving half-edges keep their relative order.

    Args:
        g: A valid dual graph
        edges: An EdgeSet of g, or the half-edge ids of one

    Returns:
        The contraction together with its vertex and half-edge relabeling
    """
    ensure_valid(g)
    edge_set = edges if isinstance(edges, EdgeSet) else EdgeSet.of(g, edges)
    removed = edge_set.half_edge_ids

    components = nx.Graph()
    components.add_nodes_from(range(g.num_vertices))
    components.add_edges_from(
        (g.half_edges[h].vertex, g.half_edges[g.involution[h]].vertex) for h in removed
    )
    ordered = sorted(
        (sorted(c) for c in nx.connected_components(components)), key=lambda c: c[0]
    )

    vertex_map = [0] * g.num_vertices
    for new, comp in enumerate(ordered):
        for v in comp:
            vertex_map[v] = new

    weights = []
    for comp in ordered:
        members = set(comp)
        inner = sum(1 for h in removed if g.half_edges[h].vertex in members) // 2
        weights.append(1 - (len(comp) - inner) + sum(g.weights[v] for v in comp))

    survivors = [h for h in range(g.num_half_edges) if h not in removed]
    half_edge_map = {h: i for i, h in enumerate(survivors)}
    owners = [vertex_map[g.half_edges[h].vertex] for h in survivors]
    involution = [half_edge_map[g.involution[h]] for h in survivors]
    legs = {label: half_edge_map[h] for label, h in g.legs.items()}

    result = DualGraph.build(weights, owners, involution, legs)
    return Contraction(
        graph=result, vertex_map=tuple(vertex_map), half_edge_map=half_edge_map
    )


def vertex_labels(g: DualGraph, v: int) -> FrozenSet[str]:
    """Label set P_v of the vertex type: the half-edges at v, as decimal strings."""
    return frozenset(str(h) for h in g.half_edges_of(v))


def vertex_type(g: DualGraph, v: int) -> Tuple[int, FrozenSet[str]]:
    return g.weights[v], vertex_labels(g, v)


def one_vertex_graph(genus_: int, labels: Iterable[str]) -> DualGraph:
    """The graph with one vertex of weight ``genus_`` carrying one leg per label."""
    ordered = sorted(labels)
    n = len(ordered)
    legs = {label: i for i, label in enumerate(ordered)}
    return DualGraph.build([genus_], [0] * n, list(range(n)), legs)


def clutch(g: DualGraph, parts: Mapping[int, DualGraph]) -> DualGraph:
    """
    Glue pointed graphs along the edges of a template graph.

    Args:
        g: Template graph
        parts: For every vertex v of g, a stable graph of genus g_v whose legs are
            labelled by the half-edges at v (see vertex_labels)

    Returns:
        The glued graph; legs of g keep their labels
    """
    ensure_valid(g)
    if set(parts) != set(range(g.num_vertices)):
        raise ValueError(
            f"Parts must be given for exactly the vertices 0..{g.num_vertices - 1}"
        )

    for v in range(g.num_vertices):
        part = ensure_valid(parts[v])
        expected = vertex_labels(g, v)
        if part.leg_labels != expected:
            raise ValueError(
                f"Label-set mismatch at vertex {v}: "
                f"{sorted(part.leg_labels)} != {sorted(expected)}"
            )
        if genus(part) != g.weights[v]:
            raise ValueError(
                f"Genus mismatch at vertex {v}: part has genus {genus(part)}, "
                f"weight is {g.weights[v]}"
            )
        if not is_stable(part):
            raise ValueError(f"Part at vertex {v} is not stable")

    vertex_offset, half_edge_offset = [], []
    nv = nh = 0
    for v in range(g.num_vertices):
        vertex_offset.append(nv)
        half_edge_offset.append(nh)
        nv += parts[v].num_vertices
        nh += parts[v].num_half_edges

    weights: List[int] = []
    owners: List[int] = []
    involution: List[int] = []
    legs: Dict[str, int] = {}
    template_labels = g.label_of()

    for v in range(g.num_vertices):
        part, hoff = parts[v], half_edge_offset[v]
        weights.extend(part.weights)
        owners.extend(o + vertex_offset[v] for o in part.owners)
        part_labels = part.label_of()
        for k, j in enumerate(part.involution):
            if j != k:
                involution.append(j + hoff)
                continue
            h = int(part_labels[k])
            partner = g.involution[h]
            if partner == h:
                involution.append(k + hoff)
                legs[template_labels[h]] = k + hoff
            else:
                w = g.half_edges[partner].vertex
                involution.append(half_edge_offset[w] + parts[w].legs[str(partner)])

    return DualGraph.build(weights, owners, involution, legs)


def relabel(g: DualGraph, half_edge_map: Sequence[int],
            vertex_map: Optional[Sequence[int]] = None) -> DualGraph:
    """Apply a renaming of half-edges (old → new) and optionally of vertices."""
    n, nv = g.num_half_edges, g.num_vertices
    vmap = list(vertex_map) if vertex_map is not None else list(range(nv))
    if sorted(half_edge_map) != list(range(n)) or sorted(vmap) != list(range(nv)):
        raise ValueError("Relabeling maps must be permutations")
    owners = [0] * n
    involution = [0] * n
    for h in range(n):
        owners[half_edge_map[h]] = vmap[g.half_edges[h].vertex]
        involution[half_edge_map[h]] = half_edge_map[g.involution[h]]
    weights = [0] * nv
    for v, w in enumerate(g.weights):
        weights[vmap[v]] = w
    legs = {label: half_edge_map[h] for label, h in g.legs.items()}
    return DualGraph.build(weights, owners, involution, legs)


def random_relabeling(
    g: DualGraph, rng: random.Random
) -> Tuple[DualGraph, List[int], List[int]]:
    half_edge_map = list(range(g.num_half_edges))
    vertex_map = list(range(g.num_vertices))
    rng.shuffle(half_edge_map)
    rng.shuffle(vertex_map)
    return relabel(g, half_edge_map, vertex_map), half_edge_map, vertex_map


def rename_legs(g: DualGraph, mapping: Mapping[str, str]) -> DualGraph:
    """Rename leg labels; labels missing from the mapping are kept."""
    legs = {mapping.get(label, label): h for label, h in g.legs.items()}
    if len(legs) != len(g.legs):
        raise ValueError("Leg renaming is not injective")
    return g.model_copy(update={"legs": dict(sorted(legs.items()))})
