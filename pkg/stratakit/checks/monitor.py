import logging
from typing import Iterable

from prometheus_client import Counter, Gauge, Histogram

logger = logging.getLogger(__name__)

# Default registry; module import creates them once.
CHECKS_TOTAL = Counter(
    'stratakit_checks_total',
    'Total number of structural checks performed',
    ['check', 'result']
)
CHECK_DURATION = Histogram(
    'stratakit_check_duration_seconds',
    'Time spent performing structural checks',
    ['check']
)
CANONICAL_FORMS_TOTAL = Counter(
    'stratakit_canonical_forms_total',
    'Canonical forms computed during stratum enumeration'
)
ENUMERATED_CLASSES = Gauge(
    'stratakit_enumerated_classes',
    'Number of isomorphism classes in the last enumeration of a type',
    ['genus', 'legs']
)
CATEGORY_MORPHISMS = Histogram(
    'stratakit_category_morphisms',
    'Number of morphisms of materialized finite categories',
    buckets=(1, 10, 100, 1000, 10000)
)


def record_check(check: str, passed: bool, skipped: bool = False) -> None:
    result = 'skipped' if skipped else 'passed' if passed else 'failed'
    CHECKS_TOTAL.labels(check=check, result=result).inc()


def record_enumeration(
    genus: int, legs: Iterable[str], classes: int, forms: int
) -> None:
    """
    Record the outcome of an enumeration run.

    Args:
        genus: Genus of the enumerated type
        legs: Leg labels of the type
        classes: Number of isomorphism classes found
        forms: Number of canonical forms computed on the way
    """
    label = ",".join(sorted(legs))
    ENUMERATED_CLASSES.labels(genus=str(genus), legs=label).set(classes)
    CANONICAL_FORMS_TOTAL.inc(forms)
    logger.debug(f"Recorded enumeration metrics for ({genus}, {{{label}}})")


def record_category(morphisms: int) -> None:
    CATEGORY_MORPHISMS.observe(morphisms)
