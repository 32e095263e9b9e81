from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError

logger = logging.getLogger(__name__)


def reference_corners(dim: int) -> list[tuple[int, ...]]:
    """Local corner offsets of a cell, first axis fastest."""
    return [tuple(reversed(c)) for c in itertools.product((0, 1), repeat=dim)]


@dataclass
class BoundaryFacets:
    """Lumped boundary data, one row per (facet, node) pair.

    ``weight`` is the facet integral of the nodal basis function and ``normal``
    the outward unit normal of the facet.
    """

    node: np.ndarray
    weight: np.ndarray
    normal: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return np.unique(self.node)

    def node_data(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        rows = np.flatnonzero(self.node == i)
        if rows.size == 0:
            raise ValueError(f"node {i} does not lie on the boundary")

        return self.weight[rows], self.normal[rows]


@dataclass
class Mesh:
    """Uniform tensor-product mesh: P1 intervals (d = 1) or Q1 quads (d = 2).

    Nodes are numbered with the first axis running fastest.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    n_cells: tuple[int, ...]
    points: np.ndarray = field(init=False, repr=False)
    cells: np.ndarray = field(init=False, repr=False)
    boundary: BoundaryFacets = field(init=False, repr=False)

    def __post_init__(self):
        self.points = self._build_points()
        self.cells = self._build_cells()
        self.boundary = self._build_boundary()

    @property
    def dim(self) -> int:
        return len(self.n_cells)

    @property
    def shape(self) -> tuple[int, ...]:
        """Nodes per axis."""
        return tuple(n + 1 for n in self.n_cells)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / np.array(self.n_cells)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    def node_index(self, *indices: int) -> int:
        index, stride = 0, 1
        for k, i in enumerate(indices):
            index += i * stride
            stride *= self.shape[k]

        return index

    def grid(self, values: np.ndarray) -> np.ndarray:
        """Nodal array reshaped to ``(n_y, n_x, ...)`` (reversed axis order)."""
        return values.reshape(tuple(reversed(self.shape)) + values.shape[1:])

    def cell_origins(self) -> np.ndarray:
        return self.points[self.cells[:, 0]]

    def _build_points(self) -> np.ndarray:
        axes = [
            np.linspace(lo, hi, n + 1)
            for lo, hi, n in zip(self.lower, self.upper, self.n_cells)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        # first axis fastest
        return np.stack([m.ravel(order="F") for m in mesh], axis=-1)

    def _build_cells(self) -> np.ndarray:
        strides = np.cumprod((1,) + self.shape[:-1])
        ranges = np.meshgrid(*(np.arange(n) for n in self.n_cells), indexing="ij")
        origins = sum(r.ravel(order="F") * s for r, s in zip(ranges, strides))
        offsets = [int(np.dot(corner, strides)) for corner in reference_corners(self.dim)]

        return np.stack([origins + offset for offset in offsets], axis=-1).astype(np.int64)

    def _build_boundary(self) -> BoundaryFacets:
        nodes, weights, normals = [], [], []

        if self.dim == 1:
            for i, sign in ((0, -1.0), (self.n_cells[0], 1.0)):
                nodes.append(i)
                weights.append(1.0)
                normals.append((sign,))
        else:
            h = self.spacing
            nx, ny = self.shape
            sides = (
                ([self.node_index(i, 0) for i in range(nx)], (0.0, -1.0), h[0]),
                ([self.node_index(i, ny - 1) for i in range(nx)], (0.0, 1.0), h[0]),
                ([self.node_index(0, j) for j in range(ny)], (-1.0, 0.0), h[1]),
                ([self.node_index(nx - 1, j) for j in range(ny)], (1.0, 0.0), h[1]),
            )
            # two-point Gauss on a facet integrates each linear trace to h / 2
            for side, normal, length in sides:
                for a, b in zip(side[:-1], side[1:]):
                    for node in (a, b):
                        nodes.append(node)
                        weights.append(0.5 * length)
                        normals.append(normal)

        return BoundaryFacets(
            node=np.array(nodes, dtype=np.int64),
            weight=np.array(weights, dtype=float),
            normal=np.array(normals, dtype=float),
        )


def build_mesh(
    lower: Sequence[float],
    upper: Sequence[float],
    n_cells: Union[int, Sequence[int]],
) -> Mesh:
    lower = tuple(float(v) for v in lower)
    upper = tuple(float(v) for v in upper)
    if isinstance(n_cells, int):
        n_cells = (n_cells,) * len(lower)
    n_cells = tuple(int(n) for n in n_cells)

    if not (len(lower) == len(upper) == len(n_cells)) or len(lower) not in (1, 2):
        raise ConfigurationError(
            f"mesh extent must be given for 1 or 2 axes, got {lower} / {upper} / {n_cells}"
        )
    if any(hi <= lo for lo, hi in zip(lower, upper)):
        raise ConfigurationError(f"invalid mesh extent {lower} .. {upper}")
    if any(n < 2 for n in n_cells):
        raise ConfigurationError(f"at least 2 cells per axis required, got {n_cells}")

    mesh = Mesh(lower=lower, upper=upper, n_cells=n_cells)
    logger.info(
        "mesh: d=%d nodes=%s cells=%d spacing=%s",
        mesh.dim,
        "x".join(map(str, mesh.shape)),
        len(mesh.cells),
        np.array2string(mesh.spacing, precision=6),
    )
    return mesh
