from __future__ import annotations

from typing import Optional

from ..errors import ConfigurationError
from .base import MaterialFields, Scenario
from .disk import HomogeneousDisk
from .flash import Flash
from .lattice import Lattice
from .line_source import LineSource
from .pulse import Pulse1D

SCENARIOS: dict[str, type[Scenario]] = {
    cls.name: cls for cls in (LineSource, Flash, HomogeneousDisk, Lattice, Pulse1D)
}


def get_scenario(name: str, source: Optional[str] = None) -> Scenario:
    cls = SCENARIOS.get(name)
    if cls is None:
        raise ConfigurationError(
            f"unknown scenario {name!r}, choose from {', '.join(SCENARIOS)}"
        )

    if source is None:
        return cls()
    if cls is not Lattice:
        raise ConfigurationError(f"scenario {name!r} has no source variants")

    return Lattice().with_overrides({"source_kind": source})


def line_source() -> Scenario:
    return LineSource()


def flash() -> Scenario:
    return Flash()


def homogeneous_disk() -> Scenario:
    return HomogeneousDisk()


def lattice(source_kind: str = "isotropic") -> Scenario:
    return Lattice().with_overrides({"source_kind": source_kind})


__all__ = [
    "SCENARIOS",
    "MaterialFields",
    "Scenario",
    "get_scenario",
    "line_source",
    "flash",
    "homogeneous_disk",
    "lattice",
]
