"""Pytest configuration and fixtures for testing."""

import os

import pytest
from click.testing import CliRunner

from app.config import reset_settings


@pytest.fixture(scope="session", autouse=True)
def setup_test_env():
    """Set up test environment variables before any tests run."""
    # Logging
    os.environ["MODCORR_LOG_LEVEL"] = "WARNING"
    os.environ["MODCORR_LOG_FORMAT"] = "text"

    # Budgets stay at their defaults unless a test overrides them
    for key in list(os.environ):
        if key.startswith("MODCORR_BUDGET_"):
            del os.environ[key]

    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def budget_env(monkeypatch):
    """Set a budget environment variable for one test and re-read settings."""

    def apply(name: str, value: int) -> None:
        monkeypatch.setenv(f"MODCORR_BUDGET_{name.upper()}", str(value))
        reset_settings()

    yield apply
    reset_settings()


@pytest.fixture
def cli_runner():
    """Create a click test runner for the command-line application."""
    return CliRunner()
