from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Scenario, isotropic_state, radius


@dataclass(repr=False)
class HomogeneousDisk(Scenario):
    """Absorbing unit disk that emits isotropically into vacuum."""

    name = "disk"
    summary = "radiating and absorbing unit disk in (-5, 5)^2"

    lower: tuple[float, ...] = (-5.0, -5.0)
    upper: tuple[float, ...] = (5.0, 5.0)
    nodes: int = 81
    t_final: float = 3.0
    disk_radius: float = 1.0
    absorption: float = 10.0
    emission: float = 1.0
    floor: float = 1e-10

    def _inside(self, points: np.ndarray) -> np.ndarray:
        return radius(points, self.center) <= self.disk_radius

    def sigma_a(self, points: np.ndarray) -> np.ndarray:
        return np.where(self._inside(points), self.absorption, 0.0)

    def source(self, points: np.ndarray) -> np.ndarray:
        q0 = np.where(self._inside(points), self.emission, 0.0)
        return isotropic_state(q0, self.dim)

    def initial(self, points: np.ndarray) -> np.ndarray:
        return isotropic_state(np.full(len(points), self.floor), self.dim)
