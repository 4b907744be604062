"""Experiment configuration model.

Values arrive as raw strings from a config file and from command-line flags
(flags win) and are validated here before anything runs. Validation failures
are re-raised as ``ConfigError`` naming the offending key.
"""

import re
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from app.errors import ConfigError
from app.models.arithmetic import DecompositionMethod
from app.models.geometry import GeneratorMode

SUPPORTED_PRIMES = (2, 3, 5, 7, 11)
PRESETS = ("lps5",)
_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


class ExperimentKind(str, Enum):
    """Experiments the runner knows."""

    AXES = "axes"
    ORBIT = "orbit"
    CHARACTERS = "characters"
    HECKE_FIX = "hecke-fix"
    HECKE_ORBIT = "hecke-orbit"
    CHECK = "check"

    @property
    def is_sphere(self) -> bool:
        return self in (
            ExperimentKind.AXES,
            ExperimentKind.ORBIT,
            ExperimentKind.CHARACTERS,
        )


def parse_lengths(value: str) -> list[int]:
    """Parse "4", "10..20" or "10,14,18,20" into a list of word lengths."""
    if match := _RANGE.match(value):
        low, high = int(match[1]), int(match[2])
        if low > high:
            raise ValueError(f"Empty range {value!r}")
        return list(range(low, high + 1))
    return [int(part) for part in value.split(",") if part.strip()]


def _floats(text: str) -> list[float]:
    return [float(part) for part in re.split(r"[\s,]+", text.strip()) if part]


class ExperimentConfig(BaseModel):
    """Fully resolved configuration of one invocation."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: ExperimentKind
    name: str = Field(default="", description="Report file stem; defaults to kind")

    # Sphere experiments
    preset: str | None = Field(default=None, description="Named generator preset")
    generators: list[tuple[float, float, float, float]] | None = Field(
        default=None, description="Explicit quaternions 'w x y z; w x y z; ...'"
    )
    mode: GeneratorMode = GeneratorMode.SEMIGROUP
    n: list[int] = Field(default_factory=list, description="Word lengths")
    harmonic_degree: int = Field(default=8, alias="L", ge=1, le=32)
    l_max: int = Field(default=4, ge=1, le=16)
    caps: list[tuple[float, float, float, float]] | None = Field(
        default=None, description="Explicit caps 'x y z r; ...'; default set if unset"
    )
    random_caps: int = Field(default=0, ge=0)
    seed: int | None = None
    base_point: tuple[float, float, float] = (0.0, 0.0, 1.0)
    identity_tol: float = Field(default=1e-9, gt=0.0)

    # Hecke experiments
    p: int = 2
    method: DecompositionMethod = DecompositionMethod.COMPOSED
    z0: tuple[float, float] = Field(
        default=(0.0, 2.0), description="Start point x + yi of hecke-orbit"
    )
    x_bins: int = Field(default=4, ge=1, le=64)
    y_breaks: list[float] = Field(default_factory=lambda: [1.0, 2.0])
    hurwitz_max: int = Field(default=200, ge=1)
    levels: int = Field(default=8, ge=1, le=24)

    # Execution
    output_dir: Path = Path("reports")
    threads: int = Field(default=1, ge=1, le=256)
    depth: int | None = Field(default=None, ge=0)

    @field_validator("n", mode="before")
    @classmethod
    def parse_n(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_lengths(value)
        if isinstance(value, int):
            return [value]
        return value

    @field_validator("generators", "caps", mode="before")
    @classmethod
    def parse_quadruples(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [_floats(item) for item in value.split(";") if item.strip()]
        return value

    @field_validator("base_point", "y_breaks", mode="before")
    @classmethod
    def parse_floats(cls, value: Any) -> Any:
        if isinstance(value, str):
            return _floats(value)
        return value

    @field_validator("z0", mode="before")
    @classmethod
    def parse_complex(cls, value: Any) -> Any:
        if isinstance(value, str):
            z = complex(value.replace(" ", "").replace("i", "j"))
            return (z.real, z.imag)
        return value

    @field_validator("n")
    @classmethod
    def check_lengths(cls, value: list[int]) -> list[int]:
        if any(length < 0 for length in value):
            raise ValueError("word lengths must be nonnegative")
        return value

    @field_validator("p")
    @classmethod
    def check_prime(cls, value: int) -> int:
        if value not in SUPPORTED_PRIMES:
            raise ValueError(f"p must be one of {SUPPORTED_PRIMES}")
        return value

    @model_validator(mode="after")
    def check_combination(self) -> "ExperimentConfig":
        if not self.name:
            self.name = self.kind.value
        if self.kind is not ExperimentKind.CHECK and not self.n:
            raise ConfigError(f"{self.kind.value} needs at least one n", "n")
        if self.kind.is_sphere:
            if self.preset is None and self.generators is None:
                self.preset = "lps5"
            if self.preset is not None and self.generators is not None:
                raise ConfigError("Give either preset or generators", "preset")
            if self.preset is not None and self.preset not in PRESETS:
                raise ConfigError(f"Unknown preset {self.preset!r}", "preset")
            if any(length < 1 for length in self.n):
                raise ConfigError("Sphere experiments need n >= 1", "n")
        if self.random_caps and self.seed is None:
            raise ConfigError("random_caps needs an explicit seed", "seed")
        if self.kind is ExperimentKind.HECKE_ORBIT and not self.z0[1] > 0:
            raise ConfigError("z0 must lie in the upper half-plane", "z0")
        return self

    @classmethod
    def from_sources(
        cls, file_values: dict[str, Any], flag_values: dict[str, Any]
    ) -> "ExperimentConfig":
        """Merge config-file values with flags (flags win) and validate.

        Raises:
            ConfigError: Naming the first offending field.
        """
        merged = {**file_values}
        merged.update({k: v for k, v in flag_values.items() if v is not None})
        try:
            return cls.model_validate(merged)
        except ValidationError as e:
            error = e.errors()[0]
            field = str(error["loc"][0]) if error["loc"] else None
            raise ConfigError(f"Invalid {field}: {error['msg']}", field) from e

    @property
    def start_point(self) -> complex:
        return complex(*self.z0)

    def as_record(self) -> dict[str, Any]:
        """JSON-compatible dump embedded in every report."""
        return self.model_dump(mode="json", by_alias=True)
