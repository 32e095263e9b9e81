from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Scenario


@dataclass(repr=False)
class Pulse1D(Scenario):
    """Smooth drifting pulse on the unit interval, away from the boundary until t_final."""

    name = "pulse1d"
    summary = "smooth 1D Gaussian pulse with flux ratio below 1/2 in vacuum"

    lower: tuple[float, ...] = (0.0,)
    upper: tuple[float, ...] = (1.0,)
    nodes: int = 101
    t_final: float = 0.2
    width: float = 0.05
    drift: float = 0.5
    floor: float = 1e-4

    def initial(self, points: np.ndarray) -> np.ndarray:
        x = np.asarray(points, dtype=float)[:, 0] - self.center[0]
        bump = np.exp(-0.5 * (x / self.width) ** 2)

        return np.column_stack((self.floor + bump, self.drift * bump))
