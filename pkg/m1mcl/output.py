"""Result files: legacy VTK fields, CSV profiles and logs, JSON run summary."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .mesh import Mesh
from .moments import check_realizable, flux_ratio
from .stepping import ResidualRecord, StepRecord
from .typed import Namespace
from .utils import ensure_directory

logger = logging.getLogger(__name__)

RESIDUAL_HEADER = "step,pseudo_time,residual_l2"
HISTORY_HEADER = "step,t,mass,min_psi0,max_flux_ratio,limited_fraction"
_FLOAT = "%.17g"


@dataclass(repr=False)
class RunSummary(Namespace):
    scenario: dict
    scheme: str
    nodes: int
    dt: float
    steps: int
    t: float
    initial_mass: float
    final_mass: float
    min_psi0: float
    max_flux_ratio: float
    mean_limited_fraction: float = 0.0
    realizability_violations: int = 0
    steady: bool = False
    converged: Optional[bool] = None
    residual: Optional[float] = None
    error: Optional[str] = None
    files: list[str] = field(default_factory=list)


def _vtk_array(name: str, values: np.ndarray) -> list[str]:
    values = np.asarray(values, dtype=float)
    components = 1 if values.ndim == 1 else values.shape[1]
    lines = [f"SCALARS {name} double {components}", "LOOKUP_TABLE default"]

    rows = values.reshape(len(values), -1)
    lines.extend(" ".join(_FLOAT % v for v in row) for row in rows)
    return lines


def write_fields(u: np.ndarray, mesh: Mesh, path: Path, title: str = "m1mcl fields") -> Path:
    """ASCII legacy VTK structured points with psi0, psi1, flux_ratio and log10_psi0."""
    check_realizable(u, f"output {path.name}")
    ensure_directory(path.parent)

    dims = list(mesh.shape) + [1] * (3 - mesh.dim)
    origin = list(mesh.lower) + [0.0] * (3 - mesh.dim)
    spacing = list(mesh.spacing) + [1.0] * (3 - mesh.dim)

    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS {} {} {}".format(*dims),
        "ORIGIN " + " ".join(_FLOAT % v for v in origin),
        "SPACING " + " ".join(_FLOAT % v for v in spacing),
        f"POINT_DATA {mesh.n_nodes}",
    ]
    lines += _vtk_array("psi0", u[:, 0])
    lines += _vtk_array("psi1", u[:, 1:])
    lines += _vtk_array("flux_ratio", flux_ratio(u))
    lines += _vtk_array("log10_psi0", np.log10(u[:, 0]))

    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def _write_csv(path: Path, header: str, rows: np.ndarray, fmt) -> Path:
    ensure_directory(path.parent)
    np.savetxt(path, rows, fmt=fmt, delimiter=",", header=header, comments="")
    logger.debug("wrote %s (%d rows)", path, len(rows))
    return path


def write_residual_log(history: Sequence[ResidualRecord], path: Path) -> Path:
    rows = np.array(
        [(r.step, r.pseudo_time, r.residual_l2) for r in history], dtype=float
    ).reshape(-1, 3)
    return _write_csv(path, RESIDUAL_HEADER, rows, ["%d", _FLOAT, _FLOAT])


def write_history(history: Sequence[StepRecord], path: Path) -> Path:
    rows = np.array(
        [
            (r.step, r.t, r.mass, r.min_psi0, r.max_flux_ratio, r.limited_fraction)
            for r in history
        ],
        dtype=float,
    ).reshape(-1, 6)
    return _write_csv(path, HISTORY_HEADER, rows, ["%d"] + [_FLOAT] * 5)


def radial_profile(
    u: np.ndarray, mesh: Mesh, center: Optional[Sequence[float]] = None
) -> np.ndarray:
    """Rows ``(r, psi0, f)``: nodal means over radius bins of width h."""
    center = mesh.center if center is None else np.asarray(center, dtype=float)
    h = float(np.min(mesh.spacing))

    r = np.linalg.norm(mesh.points - center, axis=-1)
    bins = np.floor(r / h).astype(np.int64)
    counts = np.bincount(bins)
    filled = np.flatnonzero(counts)

    psi0 = np.bincount(bins, weights=u[:, 0])[filled] / counts[filled]
    f = np.bincount(bins, weights=flux_ratio(u))[filled] / counts[filled]
    return np.column_stack(((filled + 0.5) * h, psi0, f))


def axis_lineout(
    u: np.ndarray, mesh: Mesh, axis: int = 0, center: Optional[Sequence[float]] = None
) -> np.ndarray:
    """Rows ``(x, psi0, psi1..., f)`` on the grid line through ``center`` along ``axis``."""
    center = mesh.center if center is None else np.asarray(center, dtype=float)

    grids = [np.linspace(lo, hi, n) for lo, hi, n in zip(mesh.lower, mesh.upper, mesh.shape)]
    index = [int(np.argmin(np.abs(g - c))) for g, c in zip(grids, center)]
    index[axis] = slice(None)

    # grid() reverses the axis order
    nodes = mesh.grid(np.arange(mesh.n_nodes))[tuple(reversed(index))]
    line = u[nodes]
    return np.column_stack((mesh.points[nodes, axis], line, flux_ratio(line)))


def write_radial_profile(u: np.ndarray, mesh: Mesh, path: Path, center=None) -> Path:
    return _write_csv(path, "r,psi0,f", radial_profile(u, mesh, center), _FLOAT)


def write_axis_lineout(
    u: np.ndarray, mesh: Mesh, path: Path, axis: int = 0, center=None
) -> Path:
    header = ",".join(["x", "psi0"] + [f"psi1_{k}" for k in range(mesh.dim)] + ["f"])
    return _write_csv(path, header, axis_lineout(u, mesh, axis, center), _FLOAT)


def write_summary(summary: RunSummary, path: Path) -> Path:
    ensure_directory(path.parent)
    summary.write_to_path(path)
    return path
