import logging
import os
from typing import Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

from stratakit.errors import ConfigError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
BUDGET_ENV = "STRATAKIT_BUDGET"
LOG_LEVEL_ENV = "STRATAKIT_LOG_LEVEL"


class Budgets(BaseModel):
    """Upper bounds on the size of every exhaustive computation."""
    max_canonical_forms: int = Field(default=10**6, gt=0)
    max_morphisms: int = Field(default=10**4, gt=0)
    max_product_size: int = Field(default=10**7, gt=0)
    max_group_elements: int = Field(default=10**5, gt=0)
    max_simplices: int = Field(default=10**6, gt=0)
    max_weight: int = Field(default=2**31 - 1, gt=0)


class Settings(BaseModel):
    """Process settings resolved from the environment."""
    budgets: Budgets = Field(default_factory=Budgets)
    log_level: str = "INFO"


def parse_budget_override(raw: str) -> Dict[str, int]:
    """
    Parse a STRATAKIT_BUDGET value.

    Args:
        raw: Either a bare positive integer applied to every budget, or comma-separated
            ``name=value`` pairs naming Budgets fields.

    Returns:
        Mapping of budget field name to value
    """
    raw = raw.strip()
    if not raw:
        return {}
    names = list(Budgets.model_fields)
    if "=" not in raw:
        value = _positive_int(raw, BUDGET_ENV)
        return {name: value for name in names}

    overrides: Dict[str, int] = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in names:
            raise ConfigError(f"Unknown budget {name!r} in {BUDGET_ENV}")
        overrides[name] = _positive_int(value, f"{BUDGET_ENV}.{name}")
    return overrides


def _positive_int(raw: str, field: str) -> int:
    try:
        value = int(raw.strip())
    except ValueError:
        raise ConfigError(f"{field} must be an integer, got {raw!r}")
    if value <= 0:
        raise ConfigError(f"{field} must be positive, got {value}")
    return value


def load_settings() -> Settings:
    """Read settings from the environment, after loading a local .env file if any."""
    load_dotenv()
    overrides = parse_budget_override(os.environ.get(BUDGET_ENV, ""))
    budgets = Budgets(**overrides)
    level = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    if overrides:
        logger.debug(f"Budget overrides from environment: {overrides}")
    return Settings(budgets=budgets, log_level=level)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Cached process-wide settings."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None


def get_budgets(budgets: Optional[Budgets] = None) -> Budgets:
    return budgets if budgets is not None else get_settings().budgets


def setup_logging(level: Optional[str] = None) -> None:
    """Configure root logging on stderr."""
    logging.basicConfig(
        level=getattr(logging, (level or get_settings().log_level), logging.INFO),
        format=LOG_FORMAT
    )
