from itertools import permutations

import pytest

from stratakit.graphs.builders import dumbbell, looped_dumbbell, theta
from stratakit.graphs.canonical import (
    automorphism_counts,
    automorphism_group,
    canonical_form,
    decode,
    is_automorphism,
    is_isomorphic,
)
from stratakit.graphs.dual_graph import random_relabeling

SMALL_TYPES = [(0, ["a", "b", "c", "d"]), (1, ["a"]), (1, ["a", "b"]), (2, [])]


@pytest.fixture
def small_graphs(catalog):
    """Fixture to collect every enumerated class with at most 6 half-edges."""
    graphs = []
    for g, legs in SMALL_TYPES:
        table = catalog.get_table(g, legs)
        graphs.extend(c.graph for c in table.classes if c.graph.num_half_edges <= 6)
    return graphs


def _is_isomorphism(g, h, iso):
    for x in range(g.num_half_edges):
        y = iso.half_edge_map[x]
        if iso.vertex_map[g.half_edges[x].vertex] != h.half_edges[y].vertex:
            return False
        if iso.half_edge_map[g.involution[x]] != h.involution[y]:
            return False
    legs_ok = all(iso.half_edge_map[g.legs[label]] == h.legs[label] for label in g.legs)
    weights_ok = all(
        g.weights[v] == h.weights[iso.vertex_map[v]] for v in range(g.num_vertices)
    )
    return legs_ok and weights_ok


def test_canonical_form_ignores_labeling(chain, rng):
    """Test that relabelings share the canonical encoding."""
    for g in chain:
        form = canonical_form(g)
        for _ in range(5):
            relabeled, _, _ = random_relabeling(g, rng)
            assert canonical_form(relabeled).encoding == form.encoding


def test_isomorphism_is_structure_preserving(chain, rng):
    """Test that the returned maps carry owners, involution, legs and weights across."""
    for g in chain:
        h, _, _ = random_relabeling(g, rng)
        iso = is_isomorphic(g, h)
        assert iso is not None
        assert _is_isomorphism(g, h, iso)


def test_non_isomorphic_graphs():
    """Test that distinct genus-2 graphs are told apart."""
    assert is_isomorphic(theta(), looped_dumbbell()) is None
    assert is_isomorphic(theta(), dumbbell()) is None


def test_distinct_chain_graphs_are_not_isomorphic(chain):
    """Test that the chain graphs are pairwise non-isomorphic."""
    forms = {canonical_form(g).encoding for g in chain}
    assert len(forms) == 4


def test_decode_gives_isomorphic_graph(chain):
    """Test that the canonical representative is isomorphic to the input."""
    for g in chain:
        assert is_isomorphic(decode(canonical_form(g).encoding), g) is not None


def test_decode_rejects_unknown_version():
    """Test that foreign encodings are refused."""
    with pytest.raises(ValueError, match="Unsupported canonical encoding"):
        decode(b"\x07[]")


@pytest.mark.parametrize(
    "builder,order", [(theta, 12), (dumbbell, 2), (looped_dumbbell, 8)]
)
def test_automorphism_orders(builder, order):
    """Test automorphism group orders of the genus-2 reference graphs."""
    g = builder()
    vertex, local = automorphism_counts(g)
    assert vertex * local == order
    assert automorphism_group(g).order == order


def test_automorphism_group_elements_are_automorphisms():
    """Test that every group element preserves the graph."""
    g = looped_dumbbell()
    assert all(is_automorphism(g, p) for p in automorphism_group(g).elements)


def test_chain_automorphisms(chain):
    """Test automorphism orders at the ends of the chain."""
    assert automorphism_group(chain[3]).order == 1
    assert automorphism_group(chain[2]).order == 2


def test_automorphism_orders_match_brute_force(small_graphs):
    """Test automorphism orders against a search over all half-edge permutations."""
    assert small_graphs
    for g in small_graphs:
        candidates = permutations(range(g.num_half_edges))
        count = sum(1 for p in candidates if is_automorphism(g, p))
        assert automorphism_group(g).order == count


def test_canonical_equality_matches_brute_force_isomorphism(small_graphs, rng):
    """Test that encodings agree exactly when some permutation is an isomorphism."""
    sample = [random_relabeling(g, rng)[0] for g in small_graphs]
    for g in small_graphs:
        for h in sample:
            same = canonical_form(g).encoding == canonical_form(h).encoding
            assert same == (is_isomorphic(g, h) is not None)
            if same:
                assert _is_isomorphism(g, h, is_isomorphic(g, h))
