from typing import Dict, List, Mapping, Sequence, Tuple

from stratakit.graphs.dual_graph import DualGraph


def from_edges(weights: Sequence[int], edges: Sequence[Tuple[int, int]],
               legs: Mapping[str, int]) -> DualGraph:
    """
    Build a graph from vertex weights, an edge list and a leg placement.

    Edge i becomes half-edges 2i (at its first endpoint) and 2i+1 (at its second); legs
    follow, in label order.

    Args:
        weights: Vertex weights
        edges: Pairs of vertex indices, loops allowed
        legs: Leg label → vertex index
    """
    owners: List[int] = []
    involution: List[int] = []
    for i, (u, v) in enumerate(edges):
        owners.extend([u, v])
        involution.extend([2 * i + 1, 2 * i])
    marking: Dict[str, int] = {}
    for label in sorted(legs):
        marking[label] = len(owners)
        involution.append(len(owners))
        owners.append(legs[label])
    return DualGraph.build(weights, owners, involution, marking)


def theta() -> DualGraph:
    """Two weight-0 vertices joined by three edges."""
    return from_edges([0, 0], [(0, 1), (0, 1), (0, 1)], {})


def dumbbell() -> DualGraph:
    """Two weight-1 vertices joined by one edge."""
    return from_edges([1, 1], [(0, 1)], {})


def looped_dumbbell() -> DualGraph:
    """Two weight-0 vertices, each with a loop, joined by one edge."""
    return from_edges([0, 0], [(0, 0), (0, 1), (1, 1)], {})


def genus_six_chain() -> List[DualGraph]:
    """
    Four {a,b,c}-pointed genus-6 graphs, each a contraction of the one before.

    The first has four vertices and seven edges; the last is the one-vertex graph.
    """
    first = from_edges(
        [1, 1, 0, 0],
        [(0, 1), (0, 2), (1, 3), (2, 3), (0, 0), (2, 2), (3, 3)],
        {"a": 1, "b": 2, "c": 3},
    )
    second = from_edges(
        [1, 1, 2],
        [(0, 1), (0, 2), (1, 2), (0, 0)],
        {"a": 1, "b": 2, "c": 2},
    )
    third = from_edges([5], [(0, 0)], {"a": 0, "b": 0, "c": 0})
    fourth = from_edges([6], [], {"a": 0, "b": 0, "c": 0})
    return [first, second, third, fourth]
