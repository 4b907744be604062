"""Application configuration using Pydantic Settings.

Runtime settings (logging and safety budgets) are loaded from the environment
or a ``.env`` file. Experiment configuration is separate: it is read from a
flat ``key = value`` file and command-line flags, see ``load_config_file``.
"""

import json
import logging
import sys
from datetime import datetime as dt
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.errors import ConfigError


class LoggingConfig(BaseSettings):
    """Logging configuration settings."""

    model_config = SettingsConfigDict(
        env_prefix="MODCORR_LOG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    format: str = Field(
        default="text",
        description="Log line format: 'text' for terminals, 'json' for collectors",
    )


class BudgetConfig(BaseSettings):
    """Enumeration budgets guarding against runaway experiments."""

    model_config = SettingsConfigDict(
        env_prefix="MODCORR_BUDGET_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    sphere_words: int = Field(
        default=2**26,
        description="Maximum number of words enumerated by one sphere experiment",
    )
    hecke_words: int = Field(
        default=10**8,
        description="Maximum (p+1)^n for exhaustive Hecke word enumeration",
    )
    relation_n: int = Field(
        default=10**6,
        description="Largest N accepted by the class-number relation check",
    )
    reduction_steps: int = Field(
        default=10**4,
        description="Step guard for reduction to the fundamental domain",
    )


class Settings(BaseSettings):
    """Main application settings combining all configuration sections."""

    # Load from .env
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log: LoggingConfig = Field(default_factory=LoggingConfig)
    budgets: BudgetConfig = Field(default_factory=BudgetConfig)

    def configure_logging(self, level: str | None = None) -> None:
        """Configure application logging based on settings.

        Args:
            level: Optional level overriding the configured one (CLI flag).
        """
        numeric_level = getattr(logging, (level or self.log.level).upper(), None)
        if not isinstance(numeric_level, int):
            numeric_level = logging.INFO

        root_logger = logging.getLogger()
        root_logger.handlers.clear()
        root_logger.setLevel(numeric_level)

        handler = logging.StreamHandler(sys.stderr)
        if self.log.format.lower() == "json":
            handler.setFormatter(JsonLogFormatter())
        else:
            handler.setFormatter(
                logging.Formatter(
                    "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
        root_logger.addHandler(handler)

        for noisy_logger in ("sympy", "matplotlib"):
            logging.getLogger(noisy_logger).setLevel(logging.WARNING)


class JsonLogFormatter(logging.Formatter):
    """One JSON object per log line."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_entry = {
            "severity": record.levelname,
            "message": record.getMessage(),
            "name": record.name,
            "timestamp": dt.fromtimestamp(record.created).isoformat() + "Z",
        }
        if record.exc_info:
            log_entry["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(log_entry)


def load_config_file(path: Path) -> dict[str, str]:
    """Read a flat experiment configuration file.

    One ``key = value`` pair per line; ``#`` starts a comment; blank lines are
    ignored. Keys may use dashes or underscores. Values are returned as raw
    strings and validated later by ``ExperimentConfig``.

    Args:
        path: File to read (UTF-8).

    Returns:
        Mapping of normalised keys to raw string values.

    Raises:
        ConfigError: If a line is malformed or a key repeats.
    """
    values: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}", "config") from e

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}", key)
        values[key] = value
    return values


# Global settings instance
_settings: Settings | None = None


def get_settings() -> Settings:
    """Get or create the global settings instance.

    Returns:
        Settings instance with loaded configuration.
    """
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next access re-reads the environment."""
    global _settings
    _settings = None
