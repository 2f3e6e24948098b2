import json

import pytest

from stratakit.config import BUDGET_ENV
from stratakit.graphs.builders import dumbbell, theta
from stratakit.graphs.canonical import is_isomorphic
from stratakit.graphs.dual_graph import DualGraph, random_relabeling
from stratakit.main import (
    EXIT_BUDGET,
    EXIT_INVALID,
    EXIT_OK,
    build_parser,
    config_from_args,
    main,
)


@pytest.fixture
def write_graph(tmp_path):
    """Fixture to write graphs as JSON files."""
    def write(name, g):
        path = tmp_path / f"{name}.json"
        path.write_text(g.to_json())
        return str(path)
    return write


@pytest.fixture
def subsets_file(tmp_path, subsets):
    """Fixture to write the subsets instance to a file."""
    path = tmp_path / "subsets.json"
    path.write_text(json.dumps(subsets.to_json()))
    return str(path)


def run_json(capsys, argv):
    assert main(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def test_enum_json(capsys):
    """Test enumeration output for four marked points in genus 0."""
    data = run_json(capsys, ["enum", "--genus", "0", "--legs", "a,b,c,d"])
    assert data["counts_by_codimension"] == [1, 3]


def test_enum_summary(capsys):
    """Test the summary format."""
    argv = ["enum", "--genus", "0", "--legs", "a,b,c,d", "--format", "summary"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "genus 0, legs ['a', 'b', 'c', 'd']: 4 classes"
    assert "codimension 1: 3" in out


def test_enum_relation_and_hasse(capsys):
    """Test that enumeration carries the specialisation relation and its covers."""
    data = run_json(capsys, ["enum", "--genus", "0", "--legs", "a,b,c,d", "--hasse"])
    relation = {tuple(pair) for pair in data["relation"]}
    assert len(relation) == 7
    assert all((i, i) in relation for i in range(4))
    assert len(data["hasse"]) == 3
    assert all(tuple(edge) in relation for edge in data["hasse"])


def test_enum_without_hasse(capsys):
    """Test that covers are only emitted when asked for."""
    data = run_json(capsys, ["enum", "--genus", "1", "--legs", "a"])
    assert "hasse" not in data
    assert len(data["relation"]) == 3


def test_enum_dot(capsys):
    """Test the Hasse diagram output of the enumeration command."""
    assert main(["enum", "--genus", "1", "--legs", "a", "--format", "dot"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("digraph")
    assert out.count("->") == 1


@pytest.mark.parametrize("argv", [
    ["enum", "--genus", "x"],
    ["enum", "--genus", "0", "--format", "xml"],
    ["enum"],
    ["frobnicate"],
])
def test_usage_errors_are_invalid_input(argv):
    """Test that argument errors exit with code 1 rather than argparse's 2."""
    assert main(argv) == EXIT_INVALID


def test_poset_dot(capsys):
    """Test the Hasse diagram output."""
    assert main(["poset", "--genus", "1", "--legs", "a", "--format", "dot"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("digraph")
    assert "rankdir=BT;" in out
    assert out.count("->") == 1


def test_poset_homology(capsys):
    """Test that the stratum poset has trivial reduced homology."""
    argv = ["poset", "--genus", "0", "--legs", "a,b,c,d,e", "--homology"]
    data = run_json(capsys, argv)
    assert len(data["poset"]["elements"]) == 26
    assert not any(data["homology"]["betti"])


def test_contract_loop(capsys, write_graph, chain):
    """Test that contracting the loop of the third chain graph gives the fourth."""
    path = write_graph("chain2", chain[2])
    data = run_json(capsys, ["contract", "--in", path, "--edges", "loop"])
    contracted = DualGraph.model_validate(data["graph"])
    assert is_isomorphic(contracted, chain[3]) is not None
    assert len(data["vertex_map"]) == chain[2].num_vertices


def test_contract_rejects_bad_edges(write_graph):
    """Test that malformed edge lists are invalid input."""
    path = write_graph("theta", theta())
    assert main(["contract", "--in", path, "--edges", "x,y"]) == EXIT_INVALID


def test_aut(capsys, write_graph):
    """Test the automorphism group order of the theta graph."""
    data = run_json(capsys, ["aut", "--in", write_graph("theta", theta())])
    assert data["order"] == 12


def test_iso(capsys, write_graph, rng):
    """Test isomorphism search between graph files."""
    g = theta()
    h, _, _ = random_relabeling(g, rng)
    g_path, h_path = write_graph("g", g), write_graph("h", h)
    d_path = write_graph("d", dumbbell())
    assert run_json(capsys, ["iso", "--in", g_path, "--other", h_path]) is not None
    assert run_json(capsys, ["iso", "--in", g_path, "--other", d_path]) is None


def test_clutch(capsys, write_graph):
    """Test the clutching map of the dumbbell."""
    data = run_json(capsys, ["clutch", "--in", write_graph("dumbbell", dumbbell())])
    assert data["domain_size"] == 4
    assert data["orbits"] == 3
    assert data["injective"]


def test_clcat_report(capsys, subsets_file):
    """Test the coset category report on the subsets instance."""
    data = run_json(capsys, ["clcat", "build", subsets_file, "--report"])
    assert data["automorphism_orders"] == {"{}": 8, "{1}": 2, "{2}": 2, "{1,2}": 2}
    assert data["report"]["passed"]


def test_tw_report(capsys, subsets_file):
    """Test the twisted arrow report with certificates and limits."""
    argv = ["tw", "report", subsets_file, "--theta", "{}", "--certificates"]
    data = run_json(capsys, argv + ["--limits", "0", "--functors", "2"])
    assert data["theta"] == "{}"
    assert data["report"]["passed"]


def test_tw_budget_exit_code(subsets_file):
    """Test that an exceeded budget exits with code 2."""
    argv = ["--budget", "max_morphisms=1", "tw", "report", subsets_file]
    assert main(argv + ["--theta", "{}"]) == EXIT_BUDGET


def test_unknown_theta(subsets_file):
    """Test that theta must name an element."""
    assert main(["tw", "report", subsets_file, "--theta", "{3}"]) == EXIT_INVALID


def test_missing_poset_field(tmp_path):
    """Test that an instance without a poset is invalid input."""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"group": {"degree": 1}, "action": []}))
    assert main(["clcat", "build", str(path)]) == EXIT_INVALID


def test_malformed_json(tmp_path):
    """Test that unparsable files are invalid input."""
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["clcat", "build", str(path)]) == EXIT_INVALID


def test_missing_file(tmp_path):
    """Test that a missing file is invalid input."""
    assert main(["aut", "--in", str(tmp_path / "absent.json")]) == EXIT_INVALID


def test_homology_file(capsys, tmp_path):
    """Test the homology command on the boundary of a triangle."""
    faces = [frozenset(s) for s in ([1], [2], [3], [1, 2], [1, 3], [2, 3])]
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps({
        "elements": ["1", "2", "3", "12", "13", "23"],
        "leq": [[a <= b for b in faces] for a in faces],
    }))
    data = run_json(capsys, ["homology", "--in", str(path), "--max-dim", "1"])
    assert data["betti"] == [0, 1]


def test_out_file(tmp_path):
    """Test writing the artifact to a file."""
    out = tmp_path / "enum.json"
    assert main(["--out", str(out), "enum", "--genus", "1", "--legs", "a"]) == EXIT_OK
    assert json.loads(out.read_text())["counts_by_codimension"] == [1, 1]


def test_unknown_budget_name():
    """Test that an unknown budget name is a configuration error."""
    argv = ["--budget", "max_apples=3", "enum", "--genus", "0", "--legs", "a,b,c"]
    assert main(argv) == EXIT_INVALID


def test_environment_budget_is_merged(monkeypatch):
    """Test that command-line budgets override environment budgets field by field."""
    monkeypatch.setenv(BUDGET_ENV, "max_simplices=7")
    argv = ["--budget", "max_morphisms=9", "enum", "--genus", "0"]
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    assert config.budgets.max_simplices == 7
    assert config.budgets.max_morphisms == 9
