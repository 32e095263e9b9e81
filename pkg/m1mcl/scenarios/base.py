from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Mapping

import numpy as np

from ..errors import ConfigurationError
from ..loworder import BoundaryMode
from ..typed import Namespace


def radius(points: np.ndarray, center=0.0) -> np.ndarray:
    return np.linalg.norm(np.asarray(points, dtype=float) - center, axis=-1)


def isotropic_state(psi0: np.ndarray, dim: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=float)
    return np.column_stack([psi0] + [np.zeros_like(psi0)] * dim)


class MaterialFields:
    """Material coefficients and source sampled at points of shape ``(n, d)``.

    Defaults describe vacuum without sources.
    """

    def sigma_a(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))

    def sigma_s(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))

    def source(self, points: np.ndarray) -> np.ndarray:
        return np.zeros((len(points), np.shape(points)[1] + 1))


@dataclass(repr=False)
class Scenario(MaterialFields, Namespace):
    name: ClassVar[str] = ""
    summary: ClassVar[str] = ""

    lower: tuple[float, ...] = (-0.5, -0.5)
    upper: tuple[float, ...] = (0.5, 0.5)
    nodes: int = 65
    t_final: float = 1.0
    cfl: float = 0.5
    steady_cfl: float = 0.9
    tol: float = 1e-8
    boundary: BoundaryMode = BoundaryMode.NONE

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    def initial(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def with_overrides(self, overrides: Mapping[str, str]) -> Scenario:
        if not overrides:
            return self

        try:
            return type(self).from_text(overrides, base=self)
        except KeyError as err:
            raise ConfigurationError(
                f"unknown field(s) for scenario {self.name!r}: {err.args[0]}"
            ) from err
        except ValueError as err:
            raise ConfigurationError(f"invalid override for scenario {self.name!r}: {err}") from err

    def describe(self) -> dict:
        return {"name": self.name, **self.to_json(defaults=True)}
