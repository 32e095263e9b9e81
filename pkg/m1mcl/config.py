"""Run configuration: CLI flags > config file > scenario defaults.

The config file is a flat list of ``key = value`` lines; ``#`` starts a
comment. Keys prefixed with ``scenario.`` override fields of the selected
scenario, every other key must be a ``RunConfig`` field.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Literal, Mapping, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from .errors import ConfigurationError
from .scenarios import SCENARIOS, Scenario, get_scenario
from .stepping import Scheme

logger = logging.getLogger(__name__)

SCENARIO_PREFIX = "scenario."
DEFAULT_OUTPUT_DIR = Path("output")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str = "line_source"
    source: Optional[Literal["isotropic", "anisotropic"]] = None
    nodes: Optional[int] = Field(default=None, ge=3)
    cfl: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    t_final: Optional[float] = Field(default=None, gt=0.0)
    steady: bool = False
    tol: Optional[float] = Field(default=None, gt=0.0)
    max_steps: int = Field(default=100_000, ge=1)
    scheme: Scheme = Scheme.MCL
    output_dir: Path = DEFAULT_OUTPUT_DIR
    output_every: int = Field(default=0, ge=0)
    profiles: list[Literal["radial", "axis"]] = Field(default_factory=list)
    log_every: int = Field(default=50, ge=1)
    scenario_overrides: dict[str, str] = Field(default_factory=dict)

    @field_validator("scenario")
    @classmethod
    def known_scenario(cls, value: str) -> str:
        if value not in SCENARIOS:
            raise ValueError(f"unknown scenario {value!r}, choose from {', '.join(SCENARIOS)}")

        return value

    @model_validator(mode="after")
    def steady_or_transient(self) -> RunConfig:
        if self.steady and self.t_final is not None:
            raise ValueError("--steady and t_final are mutually exclusive")

        return self

    def build_scenario(self) -> Scenario:
        scenario = get_scenario(self.scenario, self.source)
        return scenario.with_overrides(self.scenario_overrides)

    def resolved(self, scenario: Scenario) -> RunConfig:
        """Copy with every unset numeric field taken from the scenario defaults."""
        update: dict[str, Any] = {}
        if self.nodes is None:
            update["nodes"] = scenario.nodes
        if self.cfl is None:
            update["cfl"] = scenario.steady_cfl if self.steady else scenario.cfl
        if self.tol is None:
            update["tol"] = scenario.tol
        if self.t_final is None and not self.steady:
            update["t_final"] = scenario.t_final

        return self.model_copy(update=update)


def parse_config_text(
    text: str, origin: str = "<config>"
) -> tuple[dict[str, str], dict[str, str]]:
    """Split config text into run keys and ``scenario.`` overrides (values stay text)."""
    values: dict[str, str] = {}
    overrides: dict[str, str] = {}

    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f"{origin}:{number}: expected 'key = value', got {line!r}")

        if key.startswith(SCENARIO_PREFIX):
            overrides[key[len(SCENARIO_PREFIX):]] = value
        else:
            values[key.replace("-", "_")] = value

    return values, overrides


def read_config_file(path: Path) -> tuple[dict[str, str], dict[str, str]]:
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")

    return parse_config_text(path.read_text(encoding="utf-8"), origin=str(path))


def _file_values(values: Mapping[str, str]) -> dict[str, Any]:
    data: dict[str, Any] = dict(values)
    # comma separated lists in the file grammar
    if "profiles" in data:
        data["profiles"] = [item.strip() for item in data["profiles"].split(",") if item.strip()]

    return data


def load_run_config(
    cli_values: Mapping[str, Any],
    config_path: Optional[Path] = None,
) -> RunConfig:
    """Merge the config file (if any) under the CLI values; None means "not given"."""
    data: dict[str, Any] = {}
    overrides: dict[str, str] = {}

    if config_path is not None:
        file_values, overrides = read_config_file(config_path)
        data.update(_file_values(file_values))
        logger.debug("config file %s: %s", config_path, sorted(file_values))

    for key, value in cli_values.items():
        if key == "scenario_overrides":
            overrides.update(value or {})
        elif value is not None and value != () and value is not False:
            data[key] = list(value) if isinstance(value, tuple) else value

    data["scenario_overrides"] = overrides

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigurationError(_format_errors(err)) from err

    return config


def _format_errors(err: ValidationError) -> str:
    messages = []
    for error in err.errors():
        location = ".".join(str(part) for part in error["loc"]) or "config"
        messages.append(f"{location}: {error['msg']}")

    return "invalid run configuration: " + "; ".join(messages)
