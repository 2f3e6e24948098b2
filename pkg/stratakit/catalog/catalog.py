from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple
import logging

from stratakit.config import Budgets, setup_logging
from stratakit.enumeration.strata import (
    StratumTable,
    build_poset,
    check_type,
    enumerate_strata,
)
from stratakit.graphs.dual_graph import DualGraph, genus
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)

StratumType = Tuple[int, FrozenSet[str]]


class StratumCatalog:
    """Registry of enumerated stratum tables and their posets, keyed by type (g, P)."""

    def __init__(self, budgets: Optional[Budgets] = None):
        self.budgets = budgets
        self.tables: Dict[StratumType, StratumTable] = {}
        self.posets: Dict[StratumType, FinPoset] = {}
        self._setup_logging()

    def _setup_logging(self):
        """Configure logging for the catalog."""
        setup_logging()

    @staticmethod
    def key(genus_: int, labels: Iterable[str]) -> StratumType:
        genus_, legs = check_type(genus_, labels)
        return genus_, frozenset(legs)

    def register_table(self, table: StratumTable) -> None:
        """
        Register a table computed elsewhere.

        Args:
            table: A complete stratum table
        """
        key = self.key(table.genus, table.labels)
        self.tables[key] = table
        self.posets.pop(key, None)
        logger.info(
            f"Registered stratum table ({table.genus}, {list(table.labels)}) "
            f"with {len(table)} classes"
        )

    def get_table(self, genus_: int, labels: Iterable[str]) -> StratumTable:
        """
        Get the table of a type, enumerating it on first request.

        Args:
            genus_: Genus g
            labels: Leg labels P

        Returns:
            The stratum table of (g, P)
        """
        key = self.key(genus_, labels)
        if key not in self.tables:
            self.tables[key] = enumerate_strata(key[0], key[1], self.budgets)
            logger.info(f"Cached stratum table ({key[0]}, {sorted(key[1])})")
        return self.tables[key]

    def get_poset(self, genus_: int, labels: Iterable[str]) -> FinPoset:
        key = self.key(genus_, labels)
        if key not in self.posets:
            self.posets[key] = build_poset(self.get_table(*key))
        return self.posets[key]

    def list_types(self) -> List[Tuple[int, List[str]]]:
        return sorted((g, sorted(labels)) for g, labels in self.tables)

    def classify(self, g: DualGraph) -> Tuple[StratumType, int]:
        """
        Locate the class of a stable graph.

        Args:
            g: A stable graph

        Returns:
            Its type and class id within the type's table
        """
        key = self.key(genus(g), g.leg_labels)
        return key, self.get_table(*key).class_of(g)
