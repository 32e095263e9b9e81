"""Assembly of the finite element coefficients of the semi-discrete scheme.

Element matrices are integrated with the tensor-product two-point Gauss rule on
each cell, which is exact for the Q1/P1 mass and convection integrands. The
materials and the source are sampled pointwise at the same quadrature points.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError
from .mesh import BoundaryFacets, Mesh, reference_corners
from .moments import LAMBDA_MAX
from .utils import scatter_add

if TYPE_CHECKING:
    from .scenarios.base import MaterialFields

logger = logging.getLogger(__name__)


@dataclass
class ReferenceElement:
    points: np.ndarray
    weights: np.ndarray
    # basis values (nq, nb) and reference gradients (nq, nb, d)
    phi: np.ndarray
    grad: np.ndarray

    @classmethod
    def gauss(cls, dim: int, order: int = 2) -> ReferenceElement:
        x, w = np.polynomial.legendre.leggauss(order)
        x, w = 0.5 * (x + 1.0), 0.5 * w

        points = np.array(list(itertools.product(x, repeat=dim)))
        weights = np.prod(np.array(list(itertools.product(w, repeat=dim))), axis=1)

        corners = np.array(reference_corners(dim))
        factors = np.where(corners[None] == 1, points[:, None, :], 1.0 - points[:, None, :])
        phi = factors.prod(axis=-1)

        sign = np.where(corners == 1, 1.0, -1.0)
        grad = np.empty(phi.shape + (dim,))
        for k in range(dim):
            grad[..., k] = np.delete(factors, k, axis=-1).prod(axis=-1) * sign[None, :, k]

        return cls(points=points, weights=weights, phi=phi, grad=grad)

    def physical_points(self, mesh: Mesh) -> np.ndarray:
        """Quadrature points of every cell, shape ``(n_cells, nq, d)``."""
        return mesh.cell_origins()[:, None, :] + self.points[None] * mesh.spacing


@dataclass
class FemCoefficients:
    """Nodal and edge coefficients; every undirected edge i < j is stored once."""

    lumped_mass: np.ndarray
    lumped_sigma_a: np.ndarray
    lumped_sigma_t: np.ndarray
    source: np.ndarray
    edges: np.ndarray
    mass: np.ndarray
    sigma_a_mass: np.ndarray
    sigma_t_mass: np.ndarray
    c_ij: np.ndarray
    c_ji: np.ndarray
    viscosity: np.ndarray
    consistent_mass: sp.csr_matrix = field(repr=False)
    boundary: BoundaryFacets = field(repr=False)
    viscosity_sum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.viscosity_sum = scatter_add(
            self.edges.ravel(), np.repeat(self.viscosity, 2), self.n_nodes
        )

    @property
    def n_nodes(self) -> int:
        return len(self.lumped_mass)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def dim(self) -> int:
        return self.c_ij.shape[1]

    def lumped_sigma(self) -> np.ndarray:
        """Diagonal reactive weights per component: sigma_a for psi0, sigma_t for psi1."""
        return np.column_stack(
            [self.lumped_sigma_a] + [self.lumped_sigma_t] * self.dim
        )

    def edge_sigma(self) -> np.ndarray:
        return np.column_stack([self.sigma_a_mass] + [self.sigma_t_mass] * self.dim)

    def graph_viscosity_matrix(self) -> sp.csr_matrix:
        i, j = self.edges.T
        n = self.n_nodes
        off = sp.coo_matrix(
            (np.concatenate((self.viscosity, self.viscosity)), (np.r_[i, j], np.r_[j, i])),
            shape=(n, n),
        )
        return (off - sp.diags(self.viscosity_sum)).tocsr()


def _sample(mesh: Mesh, reference: ReferenceElement, function) -> np.ndarray:
    points = reference.physical_points(mesh)
    n_cells, nq, dim = points.shape
    values = np.asarray(function(points.reshape(-1, dim)), dtype=float)

    return values.reshape((n_cells, nq) + values.shape[1:])


def _global(mesh: Mesh, local: np.ndarray) -> sp.csr_matrix:
    cells = mesh.cells
    n_cells, nb = cells.shape
    local = np.broadcast_to(local, (n_cells, nb, nb))
    rows = np.broadcast_to(cells[:, :, None], local.shape)
    cols = np.broadcast_to(cells[:, None, :], local.shape)

    return sp.coo_matrix(
        (local.ravel(), (rows.ravel(), cols.ravel())),
        shape=(mesh.n_nodes, mesh.n_nodes),
    ).tocsr()


def _entries(matrix: sp.csr_matrix, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.asarray(matrix[rows, cols]).ravel()


def assemble_coefficients(mesh: Mesh, materials: MaterialFields) -> FemCoefficients:
    dim = mesh.dim
    h = mesh.spacing
    volume = mesh.cell_volume
    reference = ReferenceElement.gauss(dim)
    w, phi, grad = reference.weights, reference.phi, reference.grad

    sigma_a = _sample(mesh, reference, materials.sigma_a)
    sigma_s = _sample(mesh, reference, materials.sigma_s)
    if np.any(sigma_a < 0.0) or np.any(sigma_s < 0.0):
        raise ConfigurationError("absorption and scattering coefficients must be nonnegative")
    q = _sample(mesh, reference, materials.source)

    mass_local = volume * np.einsum("q,qa,qb->ab", w, phi, phi)
    mass = _global(mesh, mass_local)
    sigma_a_matrix = _global(mesh, volume * np.einsum("eq,q,qa,qb->eab", sigma_a, w, phi, phi))
    sigma_t_matrix = _global(
        mesh, volume * np.einsum("eq,q,qa,qb->eab", sigma_a + sigma_s, w, phi, phi)
    )
    # c_ij = (phi_i, d phi_j / dx_k)
    convection = [
        _global(mesh, volume / h[k] * np.einsum("q,qa,qb->ab", w, phi, grad[..., k]))
        for k in range(dim)
    ]

    source_local = volume * np.einsum("eqm,q,qa->eam", q, w, phi)
    source = np.column_stack(
        [
            scatter_add(mesh.cells.ravel(), source_local[..., m].ravel(), mesh.n_nodes)
            for m in range(dim + 1)
        ]
    )

    upper = sp.triu(mass, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    i, j = upper.row[order].astype(np.int64), upper.col[order].astype(np.int64)

    c_ij = np.column_stack([_entries(c, i, j) for c in convection])
    c_ji = np.column_stack([_entries(c, j, i) for c in convection])
    viscosity = LAMBDA_MAX * np.maximum(
        np.linalg.norm(c_ij, axis=1), np.linalg.norm(c_ji, axis=1)
    )
    if np.any(viscosity <= 0.0):
        raise ConfigurationError("degenerate mesh: edge without graph viscosity")

    coefficients = FemCoefficients(
        lumped_mass=np.asarray(mass.sum(axis=1)).ravel(),
        lumped_sigma_a=np.asarray(sigma_a_matrix.sum(axis=1)).ravel(),
        lumped_sigma_t=np.asarray(sigma_t_matrix.sum(axis=1)).ravel(),
        source=source,
        edges=np.column_stack((i, j)),
        mass=upper.data[order],
        sigma_a_mass=_entries(sigma_a_matrix, i, j),
        sigma_t_mass=_entries(sigma_t_matrix, i, j),
        c_ij=c_ij,
        c_ji=c_ji,
        viscosity=viscosity,
        consistent_mass=mass,
        boundary=mesh.boundary,
    )
    logger.info("assembled %d nodes, %d edges", coefficients.n_nodes, coefficients.n_edges)
    return coefficients
