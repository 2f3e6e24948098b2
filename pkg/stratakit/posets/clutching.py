from typing import Dict, List, NamedTuple, Optional, Tuple
import logging

from stratakit.catalog.catalog import StratumCatalog
from stratakit.checks.engine import CheckEngine, Report
from stratakit.enumeration.strata import StratumTable
from stratakit.errors import InvalidGraphError
from stratakit.graphs.canonical import automorphism_group
from stratakit.graphs.dual_graph import (
    DualGraph,
    clutch,
    genus,
    is_stable,
    rename_legs,
    vertex_labels,
)
from stratakit.posets.actions import GroupAction, Quotient, quotient_by_action
from stratakit.posets.poset import FinPoset, is_monotone, product

logger = logging.getLogger(__name__)


class ClutchingMap(NamedTuple):
    """The clutching map out of the product of vertex posets and its factorization."""
    domain: FinPoset
    target: FinPoset
    target_class: int
    mapping: Tuple[int, ...]
    action: GroupAction
    quotient: Quotient
    factored: Tuple[int, ...]
    injective: bool
    report: Report


def _coords(x: int, sizes: List[int]) -> List[int]:
    coords = []
    for size in reversed(sizes):
        x, c = divmod(x, size)
        coords.append(c)
    return coords[::-1]


def _index(coords: List[int], sizes: List[int]) -> int:
    x = 0
    for c, size in zip(coords, sizes):
        x = x * size + c
    return x


def clutch_poset_map(
    g: DualGraph, catalog: Optional[StratumCatalog] = None
) -> ClutchingMap:
    """
    Clutch the classes of the vertex types of g along the edges of g.

    A tuple of classes, one per vertex v of type (g_v, P_v), is sent to the class of the
    graph glued from their representatives. Aut(g) acts on the tuples by moving vertices
    and renaming the half-edge labels; the map is constant on orbits and factors through
    the orbit poset.

    Args:
        g: A stable graph
        catalog: Catalog supplying the stratum tables; a fresh one is used when omitted

    Returns:
        The map into the poset of type (genus(g), P), its factorization and a report on
        monotonicity, image containment and surjectivity onto the downset of [g];
        injectivity is only recorded
    """
    if not is_stable(g):
        raise InvalidGraphError("Clutching needs a stable template graph")
    catalog = catalog or StratumCatalog()
    nv = g.num_vertices
    vertex_tables: List[StratumTable] = [
        catalog.get_table(g.weights[v], vertex_labels(g, v)) for v in range(nv)
    ]
    factors = [catalog.get_poset(g.weights[v], vertex_labels(g, v)) for v in range(nv)]
    sizes = [len(t) for t in vertex_tables]
    domain = product(factors)

    table = catalog.get_table(genus(g), g.leg_labels)
    target = catalog.get_poset(genus(g), g.leg_labels)
    target_class = table.class_of(g)
    downset = set(target.down(target_class))

    mapping = []
    for x in range(domain.size):
        coords = _coords(x, sizes)
        parts = {v: vertex_tables[v].classes[coords[v]].graph for v in range(nv)}
        mapping.append(table.class_of(clutch(g, parts)))

    group = automorphism_group(g)
    renamed: Dict[Tuple[int, int, int], int] = {}

    def move(gid: int, v: int, c: int) -> Tuple[int, int]:
        phi = group.element(gid)
        w = g.half_edges[phi[g.half_edges_of(v)[0]]].vertex if g.half_edges_of(v) else v
        if (gid, v, c) not in renamed:
            names = {str(h): str(phi[h]) for h in g.half_edges_of(v)}
            moved = rename_legs(vertex_tables[v].classes[c].graph, names)
            renamed[(gid, v, c)] = vertex_tables[w].class_of(moved)
        return w, renamed[(gid, v, c)]

    def act(gid: int, x: int) -> int:
        image = [0] * nv
        for v, c in enumerate(_coords(x, sizes)):
            w, moved = move(gid, v, c)
            image[w] = moved
        return _index(image, sizes)

    action = GroupAction.from_function(group, domain, act)
    quotient = quotient_by_action(action)
    factored = tuple(mapping[orbit[0]] for orbit in quotient.orbits)

    engine = CheckEngine(f"clutching map of a {nv}-vertex graph")

    def monotone():
        bad = is_monotone(lambda i: mapping[i], domain, target)
        if bad is None:
            return True, "Clutching map is monotone", None
        return False, "Clutching map is not monotone", {"pair": list(bad)}

    def image_in_downset():
        outside = sorted({c for c in mapping if c not in downset})
        if not outside:
            return True, "Image lies in the downset of the template class", None
        message = "Image leaves the downset of the template class"
        return False, message, {"classes": outside}

    def surjective():
        missing = sorted(downset - set(mapping))
        if not missing:
            return True, "Every class below the template is hit", None
        return False, "Classes below the template are missed", {"classes": missing}

    def factors_through_quotient():
        for orbit in quotient.orbits:
            values = {mapping[x] for x in orbit}
            if len(values) > 1:
                return False, "Map is not constant on an orbit", {"orbit": list(orbit)}
        bad = is_monotone(lambda i: factored[i], quotient.poset, target)
        if bad is not None:
            return False, "Factored map is not monotone", {"pair": list(bad)}
        return True, "Map factors monotonically through the orbit poset", None

    engine.add_check("monotone", monotone)
    engine.add_check("image_in_downset", image_in_downset)
    engine.add_check("surjective_onto_downset", surjective)
    engine.add_check("factors_through_quotient", factors_through_quotient)
    report = engine.run()

    injective = len(set(factored)) == len(factored)
    logger.info(f"Clutching map: {domain.size} tuples, {len(factored)} orbits, "
                f"{len(set(mapping))} classes hit, injective={injective}")
    return ClutchingMap(
        domain=domain,
        target=target,
        target_class=target_class,
        mapping=tuple(mapping),
        action=action,
        quotient=quotient,
        factored=factored,
        injective=injective,
        report=report,
    )
