from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..loworder import BoundaryMode
from .base import Scenario, isotropic_state

# closed rectangles (x0, x1, y0, y1) whose union is the absorbing region
ABSORBERS = tuple(
    [(x, x + 1.0, y, y + 1.0) for x in (1.0, 5.0) for y in (1.0, 3.0, 5.0)]
    + [(x, x + 1.0, y, y + 1.0) for x in (2.0, 4.0) for y in (2.0, 4.0)]
    + [(3.0, 4.0, 1.0, 2.0)]
)
SOURCE_BOX = (3.0, 4.0, 3.0, 4.0)


def in_box(points: np.ndarray, box) -> np.ndarray:
    x0, x1, y0, y1 = box
    x, y = points[:, 0], points[:, 1]
    return (x0 <= x) & (x <= x1) & (y0 <= y) & (y <= y1)


def in_absorber(points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    inside = np.zeros(len(points), dtype=bool)
    for box in ABSORBERS:
        inside |= in_box(points, box)

    return inside


@dataclass(repr=False)
class Lattice(Scenario):
    """Checkerboard of absorbers around a central source in a scattering background.

    The anisotropic variant emits a collimated beam in the -y direction; its
    source lies on the boundary of the realizable set.
    """

    name = "lattice"
    summary = "checkerboard of absorbers in (0, 7)^2 with an (an)isotropic central source"

    lower: tuple[float, ...] = (0.0, 0.0)
    upper: tuple[float, ...] = (7.0, 7.0)
    nodes: int = 64
    t_final: float = 3.2
    boundary: BoundaryMode = BoundaryMode.DO_NOTHING
    source_kind: Literal["isotropic", "anisotropic"] = "isotropic"
    absorption: float = 10.0
    scattering: float = 1.0
    emission: float = 1.0
    floor: float = 1e-10

    def sigma_a(self, points: np.ndarray) -> np.ndarray:
        return np.where(in_absorber(points), self.absorption, 0.0)

    def sigma_s(self, points: np.ndarray) -> np.ndarray:
        return np.where(in_absorber(points), 0.0, self.scattering)

    def source(self, points: np.ndarray) -> np.ndarray:
        q0 = np.where(in_box(points, SOURCE_BOX), self.emission, 0.0)
        q = isotropic_state(q0, self.dim)
        if self.source_kind == "anisotropic":
            q[:, 2] = -q0

        return q

    def initial(self, points: np.ndarray) -> np.ndarray:
        return isotropic_state(np.full(len(points), self.floor), self.dim)
