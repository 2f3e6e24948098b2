import logging
import re
from pathlib import Path

import pytest
from pydantic import ValidationError

from stratakit.config import (
    BUDGET_ENV,
    LOG_LEVEL_ENV,
    Budgets,
    get_budgets,
    get_settings,
    load_settings,
    parse_budget_override,
    reset_settings,
)
from stratakit.errors import ConfigError, StratakitError


def test_bare_integer_applies_to_every_budget():
    """Test that a bare value sets all budgets."""
    overrides = parse_budget_override("5")
    assert set(overrides) == set(Budgets.model_fields)
    assert set(overrides.values()) == {5}


def test_named_overrides():
    """Test name=value pairs."""
    assert parse_budget_override("max_morphisms=10, max_simplices=3") == {
        "max_morphisms": 10,
        "max_simplices": 3,
    }
    assert parse_budget_override("  ") == {}


@pytest.mark.parametrize("raw,message", [
    ("max_apples=3", "Unknown budget"),
    ("max_morphisms=0", "must be positive"),
    ("max_morphisms=many", "must be an integer"),
    ("-2", "must be positive"),
])
def test_bad_overrides(raw, message):
    """Test that malformed budget values are configuration errors."""
    with pytest.raises(ConfigError, match=message):
        parse_budget_override(raw)


def test_config_error_is_a_value_error():
    """Test the error hierarchy."""
    assert issubclass(ConfigError, StratakitError)
    assert issubclass(ConfigError, ValueError)


def test_budgets_must_be_positive():
    """Test field validation of budgets."""
    with pytest.raises(ValidationError):
        Budgets(max_morphisms=0)


def test_load_settings_from_environment(monkeypatch):
    """Test that budgets and the log level come from the environment."""
    monkeypatch.setenv(BUDGET_ENV, "max_product_size=42")
    monkeypatch.setenv(LOG_LEVEL_ENV, "debug")
    settings = load_settings()
    assert settings.budgets.max_product_size == 42
    assert settings.budgets.max_morphisms == Budgets().max_morphisms
    assert settings.log_level == "DEBUG"
    assert getattr(logging, settings.log_level) == logging.DEBUG


def test_settings_are_cached(monkeypatch):
    """Test that settings are read once until reset."""
    first = get_settings()
    monkeypatch.setenv(BUDGET_ENV, "7")
    assert get_settings() is first
    reset_settings()
    assert get_settings().budgets.max_simplices == 7


def test_get_budgets_prefers_explicit_value():
    """Test that an explicit budget object wins over the settings."""
    explicit = Budgets(max_weight=3)
    assert get_budgets(explicit) is explicit
    assert get_budgets().max_weight == Budgets().max_weight


ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def line_length():
    """Fixture to read the formatter line lengths from pyproject.toml."""
    text = (ROOT / "pyproject.toml").read_text(encoding="utf-8")
    found = {int(n) for n in re.findall(r"^line[-_]length = (\d+)$", text, re.M)}
    assert len(found) == 1
    return found.pop()


def test_formatters_share_line_length(line_length):
    """Test that black and isort wrap at 88 columns."""
    assert line_length == 88


def test_sources_fit_line_length(line_length):
    """Test that no package or test line is longer than the formatter allows."""
    paths = sorted(ROOT.glob("stratakit/**/*.py")) + sorted(ROOT.glob("tests/*.py"))
    long_lines = [
        f"{path.relative_to(ROOT)}:{n}"
        for path in paths
        for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)
        if len(line) > line_length
    ]
    assert long_lines == []
