"""Command-line entry point: ``stratakit <command> ...``."""
from typing import Any, Dict, List, Literal, Optional, Sequence
import argparse
import json
import logging
import random
import sys

from pydantic import BaseModel, Field, ValidationError

from stratakit.catalog.catalog import StratumCatalog
from stratakit.categories.category import describe
from stratakit.categories.coset_category import (
    cl_category,
    object_automorphisms,
    orbit_embedding_check,
)
from stratakit.categories.instances import read_instance
from stratakit.categories.limits import random_set_functor
from stratakit.checks.engine import merge_reports
from stratakit.config import Budgets, get_settings, parse_budget_override, setup_logging
from stratakit.errors import BudgetExceededError, ConfigError, StratakitError
from stratakit.graphs.canonical import (
    automorphism_counts,
    automorphism_group,
    is_isomorphic,
)
from stratakit.graphs.dual_graph import contract, ensure_valid
from stratakit.io.formats import (
    dump_json,
    graph_to_json,
    group_to_json,
    poset_to_dot,
    poset_to_json,
    read_graph,
    read_poset,
    write_artifact,
)
from stratakit.posets.clutching import clutch_poset_map
from stratakit.posets.homology import order_complex_homology
from stratakit.twisted.decomposition import (
    decomposition_report,
    limit_decomposition_check,
)
from stratakit.twisted.twisted_arrow import (
    TwFilter,
    comma_equivalence_check,
    subcategory,
    tw_alternative,
    twisted_comparison_report,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2


class RunConfig(BaseModel):
    """One resolved invocation."""
    command: Literal[
        "enum", "poset", "contract", "clutch", "aut", "iso", "clcat", "tw", "homology"
    ]
    options: Dict[str, Any] = {}
    budgets: Budgets = Field(default_factory=Budgets)
    seed: int = 0
    out: Optional[str] = None


def _legs(raw: str) -> List[str]:
    return [label.strip() for label in raw.split(",") if label.strip()]


class ArgumentParser(argparse.ArgumentParser):
    """Parser raising ConfigError on usage errors instead of exiting."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="stratakit", description="Strata of stable curves and their categories"
    )
    parser.add_argument("--out", help="Write the artifact to this file, not stdout")
    parser.add_argument(
        "--budget", default="", help="Budget overrides, as in STRATAKIT_BUDGET"
    )
    parser.add_argument("--log-level", default=None, help="Logging level for stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enum", help="Enumerate the stable graphs of a type")
    enum.add_argument("--genus", type=int, required=True)
    enum.add_argument("--legs", default="")
    enum.add_argument("--format", choices=["json", "dot", "summary"], default="json")
    enum.add_argument(
        "--hasse", action="store_true", help="Include the covering relations"
    )

    poset = sub.add_parser("poset", help="Specialisation poset of a type")
    poset.add_argument("--genus", type=int, required=True)
    poset.add_argument("--legs", default="")
    poset.add_argument("--format", choices=["json", "dot"], default="json")
    poset.add_argument("--homology", action="store_true")
    poset.add_argument("--max-dim", type=int, default=2)

    con = sub.add_parser("contract", help="Contract edges of a graph")
    con.add_argument("--in", dest="input", required=True)
    con.add_argument(
        "--edges", required=True, help="Comma-separated half-edge ids, 'loop' or 'all'"
    )

    clutch = sub.add_parser("clutch", help="Clutching map of a graph")
    clutch.add_argument("--in", dest="input", required=True)

    aut = sub.add_parser("aut", help="Automorphism group of a graph")
    aut.add_argument("--in", dest="input", required=True)

    iso = sub.add_parser("iso", help="Isomorphism between two graphs")
    iso.add_argument("--in", dest="input", required=True)
    iso.add_argument("--other", required=True)

    clcat = sub.add_parser("clcat", help="Coset categories")
    clcat_sub = clcat.add_subparsers(dest="action", required=True)
    build = clcat_sub.add_parser("build")
    build.add_argument("spec")
    build.add_argument("--report", action="store_true")

    tw = sub.add_parser("tw", help="Twisted arrow categories")
    tw_sub = tw.add_subparsers(dest="action", required=True)
    report = tw_sub.add_parser("report")
    report.add_argument("spec")
    report.add_argument("--theta", required=True)
    report.add_argument("--certificates", action="store_true")
    report.add_argument("--limits", type=int, default=None, metavar="SEED")
    report.add_argument("--functors", type=int, default=5)

    hom = sub.add_parser(
        "homology", help="Reduced homology of the order complex of a poset"
    )
    hom.add_argument("--in", dest="input", required=True)
    hom.add_argument("--max-dim", type=int, default=2)
    hom.add_argument("--truncate", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    override = parse_budget_override(args.budget)
    budgets = get_settings().budgets.model_copy(update=override)
    options = {
        k: v for k, v in vars(args).items()
        if k not in ("command", "out", "budget", "log_level")
    }
    seed = options.get("limits") or 0
    return RunConfig(
        command=args.command,
        options=options,
        budgets=Budgets(**budgets.model_dump()),
        seed=seed,
        out=args.out,
    )


def _enum(config: RunConfig, catalog: StratumCatalog) -> str:
    o = config.options
    table = catalog.get_table(o["genus"], _legs(o["legs"]))
    if o["format"] == "summary":
        counts = table.counts_by_codimension()
        header = f"genus {table.genus}, legs {list(table.labels)}: {len(table)} classes"
        lines = [header] + [f"codimension {k}: {n}" for k, n in enumerate(counts)]
        return "\n".join(lines) + "\n"
    p = catalog.get_poset(o["genus"], _legs(o["legs"]))
    if o["format"] == "dot":
        return poset_to_dot(p, name=f"strata of genus {o['genus']}")
    data = table.to_json()
    data["counts_by_codimension"] = table.counts_by_codimension()
    data["relation"] = [list(pair) for pair in p.relation_pairs()]
    if o["hasse"]:
        data["hasse"] = [list(edge) for edge in p.hasse_edges()]
    return dump_json(data)


def _poset(config: RunConfig, catalog: StratumCatalog) -> str:
    o = config.options
    p = catalog.get_poset(o["genus"], _legs(o["legs"]))
    if o["format"] == "dot":
        return poset_to_dot(p, name=f"strata of genus {o['genus']}")
    data: Dict[str, Any] = {"poset": poset_to_json(p)}
    if o["homology"]:
        homology = order_complex_homology(
            p, o["max_dim"], truncate=True, budgets=config.budgets
        )
        data["homology"] = homology.model_dump()
    return dump_json(data)


def _contract(config: RunConfig) -> str:
    g = ensure_valid(read_graph(config.options["input"]))
    choice = config.options["edges"].strip()
    if choice == "loop":
        half_edges = [h for e in g.loops() for h in e]
    elif choice == "all":
        half_edges = [h for e in g.edges() for h in e]
    else:
        try:
            half_edges = [int(h) for h in choice.split(",") if h.strip()]
        except ValueError:
            raise StratakitError(
                f"edges: expected half-edge ids, 'loop' or 'all', got {choice!r}"
            )
    result = contract(g, half_edges)
    return dump_json({
        "graph": graph_to_json(result.graph),
        "vertex_map": list(result.vertex_map),
        "half_edge_map": {str(k): v for k, v in sorted(result.half_edge_map.items())},
    })


def _clutch(config: RunConfig, catalog: StratumCatalog) -> str:
    g = read_graph(config.options["input"])
    cmap = clutch_poset_map(g, catalog)
    return dump_json({
        "domain_size": cmap.domain.size,
        "target_class": cmap.target_class,
        "mapping": list(cmap.mapping),
        "orbits": cmap.quotient.poset.size,
        "factored": list(cmap.factored),
        "injective": cmap.injective,
        "report": cmap.report.to_dict(),
    })


def _aut(config: RunConfig) -> str:
    g = read_graph(config.options["input"])
    vertex, local = automorphism_counts(g)
    data = group_to_json(automorphism_group(g))
    data.update({"vertex_automorphisms": vertex, "edge_local_symmetries": local})
    return dump_json(data)


def _iso(config: RunConfig) -> str:
    g = read_graph(config.options["input"])
    found = is_isomorphic(g, read_graph(config.options["other"]))
    return dump_json(found.model_dump(mode="json") if found is not None else None)


def _clcat(config: RunConfig) -> str:
    instance = read_instance(config.options["spec"])
    a, d = instance.action, instance.delta
    c = cl_category(a, d, budgets=config.budgets)
    data: Dict[str, Any] = {"instance": instance.name, "category": describe(c)}
    if config.options.get("report"):
        reports = [orbit_embedding_check(c, a, d, budgets=config.budgets)]
        orders = {}
        for x in range(c.num_objects):
            auts = object_automorphisms(c, a, d, x)
            orders[str(c.objects[x])] = auts.order
            reports.append(auts.report)
            reports.append(comma_equivalence_check(a, d, x, cl=c))
        data["automorphism_orders"] = orders
        merged = merge_reports(f"coset category of {instance.name}", reports)
        data["report"] = merged.to_dict()
    return dump_json(data)


def _tw(config: RunConfig) -> str:
    o = config.options
    instance = read_instance(o["spec"])
    a, d = instance.action, instance.delta
    theta = instance.element(o["theta"])
    budgets = config.budgets
    tw = tw_alternative(a, d, budgets=budgets)
    reports = [
        twisted_comparison_report(a, d, budgets=budgets),
        decomposition_report(
            a, d, theta, tw=tw, certificates=o["certificates"], budgets=budgets
        ),
    ]
    data: Dict[str, Any] = {
        "instance": instance.name,
        "theta": str(instance.poset.elements[theta]),
        "category": describe(tw.category),
    }
    if o["limits"] is not None:
        tw_theta, _ = subcategory(tw, a, TwFilter(kind="theta", theta=theta))
        rng = random.Random(config.seed)
        for _ in range(o["functors"]):
            f = random_set_functor(tw_theta.category, rng)
            reports.append(limit_decomposition_check(a, tw_theta, theta, f, budgets))
    merged = merge_reports(f"twisted arrows of {instance.name}", reports)
    data["report"] = merged.to_dict()
    return dump_json(data)


def _homology(config: RunConfig) -> str:
    o = config.options
    p = read_poset(o["input"])
    homology = order_complex_homology(
        p, o["max_dim"], truncate=o["truncate"], budgets=config.budgets
    )
    return dump_json(homology.model_dump())


def run(config: RunConfig) -> int:
    """
    Execute one command and write its artifact.

    Args:
        config: The resolved invocation

    Returns:
        0 on success, 1 on invalid input, 2 when a budget is exceeded
    """
    try:
        catalog = StratumCatalog(budgets=config.budgets)
        handlers = {
            "enum": lambda: _enum(config, catalog),
            "poset": lambda: _poset(config, catalog),
            "contract": lambda: _contract(config),
            "clutch": lambda: _clutch(config, catalog),
            "aut": lambda: _aut(config),
            "iso": lambda: _iso(config),
            "clcat": lambda: _clcat(config),
            "tw": lambda: _tw(config),
            "homology": lambda: _homology(config),
        }
        text = handlers[config.command]()
        write_artifact(text, config.out)
        return EXIT_OK
    except BudgetExceededError as e:
        logger.error(f"Budget exceeded: {e}")
        return EXIT_BUDGET
    except ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(part) for part in first["loc"]) or "<root>"
        logger.error(f"Invalid input at {path}: {first['msg']}")
        return EXIT_INVALID
    except json.JSONDecodeError as e:
        logger.error(f"Malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")
        return EXIT_INVALID
    except (StratakitError, OSError) as e:
        logger.error(f"{config.command} failed: {e}")
        return EXIT_INVALID


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        setup_logging()
        logger.error(f"Invalid arguments: {e}")
        return EXIT_INVALID
    setup_logging(args.log_level.upper() if args.log_level else None)
    try:
        config = config_from_args(args)
    except (StratakitError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
