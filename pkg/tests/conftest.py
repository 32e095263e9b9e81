from __future__ import annotations

import numpy as np
import pytest

from m1mcl.assembly import assemble_coefficients
from m1mcl.mesh import build_mesh
from m1mcl.scenarios import MaterialFields


class ConstantMaterials(MaterialFields):
    def __init__(self, sigma_a=0.0, sigma_s=0.0, q=None):
        self._sigma_a = sigma_a
        self._sigma_s = sigma_s
        self._q = q

    def sigma_a(self, points):
        return np.full(len(points), float(self._sigma_a))

    def sigma_s(self, points):
        return np.full(len(points), float(self._sigma_s))

    def source(self, points):
        if self._q is None:
            return super().source(points)

        return np.tile(np.asarray(self._q, dtype=float), (len(points), 1))


def random_states(rng: np.random.Generator, n: int, dim: int, max_ratio: float = 1.0):
    """Strictly realizable states with psi0 in [1e-3, 10) and f in [0, max_ratio)."""
    psi0 = 10.0 ** rng.uniform(-3.0, 1.0, n)
    f = max_ratio * rng.uniform(0.0, 1.0, n)
    direction = rng.normal(size=(n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)

    return np.column_stack((psi0, (f * psi0)[:, None] * direction))


def compact_bump(points, center=0.0, radius=0.25, floor=1e-4, drift=0.3):
    """psi0 = floor + (1 - (r/R)^2)^2 inside R, psi1 along x; exactly the floor outside."""
    r2 = np.sum((np.asarray(points) - center) ** 2, axis=-1) / radius**2
    bump = np.where(r2 < 1.0, (1.0 - r2) ** 2, 0.0)

    u = np.zeros((len(points), points.shape[1] + 1))
    u[:, 0] = floor + bump
    u[:, 1] = drift * bump
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def vacuum():
    return ConstantMaterials()


@pytest.fixture
def mesh1d():
    return build_mesh((0.0,), (1.0,), 10)


@pytest.fixture
def mesh2d():
    return build_mesh((-0.5, -0.5), (0.5, 0.5), 8)


@pytest.fixture
def coeffs1d(mesh1d, vacuum):
    return assemble_coefficients(mesh1d, vacuum)


@pytest.fixture
def coeffs2d(mesh2d, vacuum):
    return assemble_coefficients(mesh2d, vacuum)
