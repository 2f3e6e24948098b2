"""
File formats: graphs, posets, groups and instances as JSON, Hasse diagrams as DOT.

JSON artifacts are written with sorted keys and two-space indentation; DOT output lists
nodes by element index and edges in sorted order, so identical inputs give identical
bytes.
"""
from typing import Any, Dict, Optional
import json
import logging
import sys

from stratakit.errors import StratakitError
from stratakit.graphs.dual_graph import DualGraph
from stratakit.groups.perm_group import PermGroup
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_json(path: str) -> Any:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def read_graph(path: str) -> DualGraph:
    with open(path, encoding="utf-8") as f:
        return DualGraph.from_json(f.read())


def graph_to_json(g: DualGraph) -> Dict[str, Any]:
    return g.model_dump(mode="json")


def poset_to_json(p: FinPoset) -> Dict[str, Any]:
    """Elements, full relation and Hasse covers of a poset."""
    data = p.to_json()
    data["hasse"] = [list(e) for e in p.hasse_edges()]
    return data


def read_poset(path: str) -> FinPoset:
    data = read_json(path)
    if not isinstance(data, dict) or "elements" not in data or "leq" not in data:
        raise StratakitError(f"{path}: a poset needs the fields elements and leq")
    return FinPoset.from_json(data)


def group_to_json(group: PermGroup) -> Dict[str, Any]:
    data = group.to_json()
    data["order"] = group.order
    return data


def _dot_id(label: Any) -> str:
    return json.dumps(str(label), ensure_ascii=False)


def poset_to_dot(p: FinPoset, name: str = "poset") -> str:
    """Hasse diagram, edges pointing from the smaller element to the cover."""
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=BT;"]
    for i, label in enumerate(p.elements):
        lines.append(f"  n{i} [label={_dot_id(label)}];")
    for i, j in p.hasse_edges():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_artifact(text: str, out: Optional[str] = None) -> None:
    """Write to a file, or to stdout when no path is given."""
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Wrote {len(text)} characters to {out}")
    else:
        sys.stdout.write(text)
