from typing import Any, Callable, Dict, List, Optional, Tuple
import logging

from pydantic import BaseModel

from stratakit.checks.monitor import CHECK_DURATION, record_check

logger = logging.getLogger(__name__)

CheckOutcome = Tuple[bool, str, Optional[Dict[str, Any]]]


class CheckSkipped(Exception):
    """Raised by a check that could not run; its result is neither passed nor failed."""


class CheckResult(BaseModel):
    """Represents the result of a single structural check."""
    name: str
    passed: bool
    message: str
    details: Optional[Dict[str, Any]] = None
    skipped: bool = False


class Report(BaseModel):
    """An ordered collection of check results about one subject."""
    subject: str
    checks: List[CheckResult] = []

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and not c.skipped]

    def skipped(self) -> List[CheckResult]:
        return [c for c in self.checks if c.skipped]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise ValueError(f"Check {name} not found in report {self.subject}")

    def names(self) -> List[str]:
        return [c.name for c in self.checks]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "skipped": [c.name for c in self.skipped()],
            "checks": [c.model_dump() for c in self.checks],
        }


class CheckEngine:
    """Runs named checks in order and collects their results into a Report."""

    def __init__(self, subject: str):
        self.subject = subject
        self.checks: Dict[str, Callable[[], CheckOutcome]] = {}

    def add_check(self, name: str, check: Callable[[], CheckOutcome]) -> None:
        """Add a check; it returns (passed, message, details)."""
        if name in self.checks:
            raise ValueError(f"Check {name} already registered for {self.subject}")
        self.checks[name] = check
        logger.debug(f"Added check {name} to {self.subject}")

    def run(self, only: Optional[str] = None) -> Report:
        """
        Execute the registered checks.

        Args:
            only: Optional name of a single check to run. If None, runs all checks.

        Returns:
            Report with one result per executed check
        """
        results = []
        names = [only] if only else list(self.checks)

        for name in names:
            if name not in self.checks:
                raise ValueError(f"Check {name} not found")
            try:
                with CHECK_DURATION.labels(check=name).time():
                    result = self._execute_check(name)
            except CheckSkipped as e:
                logger.warning(f"{self.subject}: check {name} skipped: {e}")
                result = CheckResult(
                    name=name, passed=False, skipped=True, message=f"Skipped: {e}"
                )
            except Exception as e:
                logger.error(f"Error executing check {name}: {str(e)}")
                result = CheckResult(
                    name=name,
                    passed=False,
                    message=f"Error executing check: {str(e)}"
                )
            record_check(name, result.passed, result.skipped)
            if not result.passed and not result.skipped:
                logger.warning(f"{self.subject}: check {name} failed: {result.message}")
            results.append(result)

        report = Report(subject=self.subject, checks=results)
        passed = sum(c.passed for c in results)
        logger.info(
            f"Finished {self.subject}: {passed}/{len(results)} checks passed, "
            f"{len(report.skipped())} skipped"
        )
        return report

    def _execute_check(self, name: str) -> CheckResult:
        passed, message, details = self.checks[name]()
        return CheckResult(
            name=name, passed=bool(passed), message=message, details=details
        )


def merge_reports(subject: str, reports: List[Report], prefix: bool = True) -> Report:
    """Concatenate reports, prefixing check names with their source subject."""
    checks = []
    for r in reports:
        for c in r.checks:
            name = f"{r.subject}.{c.name}" if prefix else c.name
            checks.append(c.model_copy(update={"name": name}))
    return Report(subject=subject, checks=checks)
