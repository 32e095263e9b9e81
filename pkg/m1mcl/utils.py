from pathlib import Path

import numpy as np


def scatter_add(index: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    """Sum ``values`` into ``size`` bins; supports trailing component axes."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.bincount(index, weights=values, minlength=size)

    flat = values.reshape(len(values), -1)
    out = np.column_stack(
        [np.bincount(index, weights=flat[:, m], minlength=size) for m in range(flat.shape[1])]
    )
    return out.reshape((size,) + values.shape[1:])


def edge_scatter(edges: np.ndarray, to_i: np.ndarray, to_j: np.ndarray, size: int) -> np.ndarray:
    """Accumulate per-edge contributions of node i and node j into a nodal array."""
    return scatter_add(
        np.concatenate((edges[:, 0], edges[:, 1])),
        np.concatenate((to_i, to_j)),
        size,
    )


def ensure_directory(path: Path) -> Path:
    if path.exists() and not path.is_dir():
        raise FileExistsError(str(path), "is not a directory.")

    path.mkdir(parents=True, exist_ok=True)
    return path
