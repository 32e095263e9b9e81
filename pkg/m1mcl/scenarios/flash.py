from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Scenario, radius


@dataclass(repr=False)
class Flash(Scenario):
    """Nearly collimated blob of particles moving along the x axis."""

    name = "flash"
    summary = "anisotropic blob with f = 0.9 moving through vacuum in (-10, 10)^2"

    lower: tuple[float, ...] = (-10.0, -10.0)
    upper: tuple[float, ...] = (10.0, 10.0)
    nodes: int = 81
    t_final: float = 6.0
    blob_radius: float = 0.5
    psi0: float = 1.0
    flux_ratio: float = 0.9
    floor: float = 1e-10

    def initial(self, points: np.ndarray) -> np.ndarray:
        inside = radius(points, self.center) <= self.blob_radius

        u = np.zeros((len(points), self.dim + 1))
        u[:, 0] = np.where(inside, self.psi0, self.floor)
        u[:, 1] = np.where(inside, self.flux_ratio * self.psi0, 0.0)
        return u
