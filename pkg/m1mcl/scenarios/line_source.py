from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Scenario, isotropic_state, radius


@dataclass(repr=False)
class LineSource(Scenario):
    """Isotropic pulse at the origin spreading through vacuum."""

    name = "line_source"
    summary = "pulse of radiation at the origin of (-0.5, 0.5)^2 in vacuum"

    t_final: float = 0.45
    theta: float = 0.02
    floor: float = 1e-4

    def initial(self, points: np.ndarray) -> np.ndarray:
        r2 = radius(points, self.center) ** 2
        psi0 = np.maximum(np.exp(-10.0 * r2 / self.theta**2), self.floor)

        return isotropic_state(psi0, self.dim)
