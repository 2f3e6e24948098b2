import pytest

from stratakit.errors import InvalidGraphError
from stratakit.graphs.builders import dumbbell, from_edges, looped_dumbbell, theta
from stratakit.graphs.canonical import is_isomorphic
from stratakit.graphs.dual_graph import (
    DualGraph,
    EdgeSet,
    clutch,
    contract,
    dimension,
    genus,
    is_stable,
    one_vertex_graph,
    random_relabeling,
    rename_legs,
    validate,
    vertex_labels,
    vertex_type,
)

SMALL_TYPES = [(0, ["a", "b", "c", "d"]), (1, ["a", "b"]), (2, []), (1, ["a"])]


def test_chain_graphs_are_stable_genus_six(chain):
    """Test the reference chain: every graph is valid, stable and of genus 6."""
    for g in chain:
        assert validate(g).valid
        assert genus(g) == 6
        assert is_stable(g)
        assert g.leg_labels == frozenset({"a", "b", "c"})


def test_chain_dimensions(chain):
    """Test stratum dimensions of the first and last chain graph."""
    assert dimension(chain[3]) == 18
    assert dimension(chain[0]) == 11


def test_validate_reports_broken_involution():
    """Test that a non-involutive pairing is reported by field."""
    g = DualGraph.build([0], [0, 0], [1, 1])
    report = validate(g)
    assert not report.valid
    assert "involution" in report.fields()


def test_validate_reports_unlabelled_leg():
    """Test that a fixed point without a label is a marking violation."""
    report = validate(DualGraph.build([1], [0], [0]))
    assert report.fields() == ["marking"]
    assert "carry no label" in report.violations[0].message


def test_validate_reports_disconnected_graph():
    """Test that two isolated vertices are reported as disconnected."""
    report = validate(from_edges([1, 1], [], {}))
    assert "connected" in report.fields()


def test_genus_rejects_invalid_graph():
    """Test that invariant checks raise on invalid input."""
    with pytest.raises(ValueError, match="Invalid dual graph"):
        genus(DualGraph.build([0], [0, 0], [1, 1]))


def test_genus_of_reference_graphs():
    """Test genus of the genus-2 reference graphs."""
    assert genus(theta()) == 2
    assert genus(dumbbell()) == 2
    assert genus(looped_dumbbell()) == 2


def test_unstable_vertex_detected():
    """Test that a genus-0 vertex of valence 2 is unstable."""
    g = from_edges([0, 1], [(0, 1)], {"a": 0})
    assert genus(g) == 1
    assert not is_stable(g)


def test_contract_theta_edge():
    """Test contracting one edge of theta and the returned relabeling."""
    result = contract(theta(), [0, 1])
    assert result.graph.num_vertices == 1
    assert result.graph.weights == (0,)
    assert len(result.graph.loops()) == 2
    assert result.vertex_map == (0, 0)
    assert result.half_edge_map == {2: 0, 3: 1, 4: 2, 5: 3}
    assert genus(result.graph) == 2


def test_contract_loop_moves_down_the_chain(chain):
    """Test that contracting the loop of the third chain graph gives the fourth."""
    result = contract(chain[2], [h for e in chain[2].loops() for h in e])
    assert result.graph.weights == (6,)
    assert is_isomorphic(result.graph, chain[3]) is not None


def test_edge_set_rejects_open_half_edge():
    """Test that an edge set must be closed under the involution."""
    with pytest.raises(ValueError, match="not closed under the involution"):
        EdgeSet.of(theta(), [0])


def test_edge_set_rejects_leg(chain):
    """Test that legs cannot be contracted."""
    leg = chain[3].legs["a"]
    with pytest.raises(ValueError, match="contains leg"):
        contract(chain[3], [leg])


def test_contraction_preserves_genus_and_stability(catalog, rng):
    """Test genus invariance and stability preservation on random contractions."""
    graphs = [
        c.graph for g, legs in SMALL_TYPES for c in catalog.get_table(g, legs).classes
    ]
    for _ in range(300):
        g, _, _ = random_relabeling(rng.choice(graphs), rng)
        chosen = [e for e in g.edges() if rng.random() < 0.5]
        result = contract(g, [h for e in chosen for h in e]).graph
        assert genus(result) == genus(g)
        assert is_stable(result)
        assert result.num_edges == g.num_edges - len(chosen)


def test_clutch_one_vertex_parts_rebuilds_template():
    """Test that gluing one-vertex parts gives back the template graph."""
    g = theta()
    parts = {
        v: one_vertex_graph(g.weights[v], vertex_labels(g, v))
        for v in range(g.num_vertices)
    }
    glued = clutch(g, parts)
    assert is_isomorphic(glued, g) is not None


def test_clutch_rejects_label_mismatch():
    """Test that a part with the wrong labels is refused."""
    g = dumbbell()
    parts = {0: one_vertex_graph(1, ["x"]), 1: one_vertex_graph(1, vertex_labels(g, 1))}
    with pytest.raises(ValueError, match="Label-set mismatch"):
        clutch(g, parts)


def test_clutch_rejects_unstable_part():
    """Test that a part with a weight-0 vertex of valence 2 is refused."""
    g = dumbbell()
    unstable = from_edges([1, 0], [(0, 1)], {"0": 1})
    assert genus(unstable) == 1
    assert unstable.leg_labels == vertex_labels(g, 0)
    parts = {0: unstable, 1: one_vertex_graph(1, vertex_labels(g, 1))}
    with pytest.raises(ValueError, match="Part at vertex 0 is not stable"):
        clutch(g, parts)


def test_random_relabeling_is_isomorphic(chain, rng):
    """Test that relabeled graphs are recognized as isomorphic."""
    for _ in range(10):
        relabeled, _, _ = random_relabeling(chain[0], rng)
        assert is_isomorphic(chain[0], relabeled) is not None


def test_rename_legs_rejects_collisions(chain):
    """Test that renaming two legs to the same label fails."""
    with pytest.raises(ValueError, match="not injective"):
        rename_legs(chain[0], {"a": "b"})


def test_json_round_trip(chain):
    """Test that a graph survives serialization."""
    assert DualGraph.from_json(chain[1].to_json()) == chain[1]


def test_invalid_graph_error_carries_violations():
    """Test that the raised error lists the violations."""
    with pytest.raises(InvalidGraphError) as info:
        is_stable(from_edges([1, 1], [], {}))
    assert [v.field for v in info.value.violations] == ["connected"]


def test_vertex_type_of_dumbbell():
    """Test that each dumbbell vertex has type (1, one label)."""
    g = dumbbell()
    for v in range(g.num_vertices):
        weight, labels = vertex_type(g, v)
        assert weight == 1
        assert labels == frozenset(str(h) for h in g.half_edges_of(v))
        assert len(labels) == 1
