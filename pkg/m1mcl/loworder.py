"""Invariant domain preserving low-order scheme.

The spatial operator is written in bar state form
``sum_j 2 d_ij (ubar_ij - u_i) + b_i + s_i``; a stage of the fully discrete
scheme treats the lumped reactive term implicitly and everything else
explicitly, which keeps every nodal state realizable under the CFL condition.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .assembly import FemCoefficients
from .errors import CFLViolationError
from .mesh import BoundaryFacets
from .moments import check_realizable, flux, lax_friedrichs_flux, normal_flux
from .utils import edge_scatter, scatter_add

logger = logging.getLogger(__name__)

# relative slack for dt computed from the same coefficients
_CFL_TOLERANCE = 1e-12


@dataclass
class BarStates:
    """Bar states of every stored edge, seen from node i (``ij``) and node j (``ji``)."""

    ij: np.ndarray
    ji: np.ndarray


class BoundaryMode(str, Enum):
    # no flux correction on the boundary, the weak form keeps f(u_i).n there
    NONE = "none"
    DO_NOTHING = "do-nothing"


@dataclass
class StageResult:
    u: np.ndarray
    dt: float
    limited_fraction: float = 0.0


def bar_state(u_i, u_j, c_ij, d_ij) -> np.ndarray:
    u_i = np.asarray(u_i, dtype=float)
    u_j = np.asarray(u_j, dtype=float)
    d_ij = np.asarray(d_ij, dtype=float)[..., None]

    return 0.5 * (u_i + u_j) - normal_flux(flux(u_j) - flux(u_i), c_ij) / (2.0 * d_ij)


def bar_state_split(u_i, u_j, c_ij, d_ij) -> tuple[np.ndarray, np.ndarray]:
    """Auxiliary states whose average is the bar state."""
    u_i = np.asarray(u_i, dtype=float)
    u_j = np.asarray(u_j, dtype=float)
    d_ij = np.asarray(d_ij, dtype=float)[..., None]

    return (
        u_i + normal_flux(flux(u_i), c_ij) / d_ij,
        u_j - normal_flux(flux(u_j), c_ij) / d_ij,
    )


def low_order_bar_states(
    u: np.ndarray, coeffs: FemCoefficients, fluxes: Optional[np.ndarray] = None
) -> BarStates:
    if fluxes is None:
        fluxes = flux(u)

    i, j = coeffs.edges.T
    average = 0.5 * (u[i] + u[j])
    jump = fluxes[j] - fluxes[i]
    d2 = 2.0 * coeffs.viscosity[:, None]

    return BarStates(
        ij=average - normal_flux(jump, coeffs.c_ij) / d2,
        ji=average + normal_flux(jump, coeffs.c_ji) / d2,
    )


def bar_state_rhs(u: np.ndarray, bars: BarStates, coeffs: FemCoefficients) -> np.ndarray:
    i, j = coeffs.edges.T
    d2 = 2.0 * coeffs.viscosity[:, None]

    return edge_scatter(coeffs.edges, d2 * (bars.ij - u[i]), d2 * (bars.ji - u[j]), len(u))


def boundary_term(u_i, u_hat_i, weights, normals) -> np.ndarray:
    """Lumped boundary flux correction of one boundary node."""
    weights = np.asarray(weights, dtype=float)
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    if weights.size == 0:
        raise ValueError("boundary term requested for a node without boundary facets")

    u_i = np.broadcast_to(np.asarray(u_i, dtype=float), (len(normals),) + np.shape(u_i))
    u_hat_i = np.broadcast_to(np.asarray(u_hat_i, dtype=float), u_i.shape)

    correction = normal_flux(flux(u_i), normals) - lax_friedrichs_flux(u_i, u_hat_i, normals)
    return np.sum(weights[:, None] * correction, axis=0)


def boundary_terms(u: np.ndarray, u_hat: np.ndarray, boundary: BoundaryFacets) -> np.ndarray:
    node = boundary.node
    u_b = u[node]
    correction = normal_flux(flux(u_b), boundary.normal) - lax_friedrichs_flux(
        u_b, u_hat[node], boundary.normal
    )

    return scatter_add(node, boundary.weight[:, None] * correction, len(u))


def exterior_states(u: np.ndarray, mode: BoundaryMode) -> Optional[np.ndarray]:
    """States ``u_hat`` outside the boundary nodes, or None when no boundary term is assembled."""
    if BoundaryMode(mode) is BoundaryMode.DO_NOTHING:
        return u

    return None


def low_order_rhs(
    u: np.ndarray,
    coeffs: FemCoefficients,
    boundary_states: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Transport, boundary and source part of the low-order operator.

    The reactive term is left to the implicit scaling of the stage. Without
    ``boundary_states`` the do-nothing condition applies and b_i vanishes.
    """
    check_realizable(u, "low-order operator")
    bars = low_order_bar_states(u, coeffs)

    return explicit_rhs(u, bars, coeffs, boundary_states)


def explicit_rhs(
    u: np.ndarray,
    bars: BarStates,
    coeffs: FemCoefficients,
    boundary_states: Optional[np.ndarray] = None,
) -> np.ndarray:
    rhs = bar_state_rhs(u, bars, coeffs) + coeffs.source
    if boundary_states is not None:
        rhs += boundary_terms(u, boundary_states, coeffs.boundary)

    return rhs


def max_stable_dt(coeffs: FemCoefficients) -> float:
    return float(np.min(coeffs.lumped_mass / (2.0 * coeffs.viscosity_sum)))


def reactive_scaling(coeffs: FemCoefficients, dt: float) -> np.ndarray:
    m = coeffs.lumped_mass[:, None]
    return m / (m + dt * coeffs.lumped_sigma())


def imex_euler_stage(
    u: np.ndarray,
    dt: float,
    coeffs: FemCoefficients,
    bar_states: Optional[BarStates] = None,
    boundary_states: Optional[np.ndarray] = None,
) -> StageResult:
    """One forward Euler stage with implicit lumped reaction.

    ``bar_states`` replaces the low-order bar states, e.g. by the limited
    states of the flux-corrected scheme.
    """
    limit = max_stable_dt(coeffs)
    if dt > limit * (1.0 + _CFL_TOLERANCE):
        raise CFLViolationError(dt, limit)

    check_realizable(u, "stage input")
    if bar_states is None:
        bar_states = low_order_bar_states(u, coeffs)

    rhs = explicit_rhs(u, bar_states, coeffs, boundary_states)
    u_new = reactive_scaling(coeffs, dt) * (u + dt / coeffs.lumped_mass[:, None] * rhs)

    check_realizable(u_new, "stage output")
    return StageResult(u=u_new, dt=dt)


def imex_increment(
    u: np.ndarray,
    dt: float,
    coeffs: FemCoefficients,
    bar_states: Optional[BarStates] = None,
) -> np.ndarray:
    """``g`` with ``u + dt * g`` equal to the IMEX stage, for generic integrators."""
    if bar_states is None:
        bar_states = low_order_bar_states(u, coeffs)

    m = coeffs.lumped_mass[:, None]
    scaling = reactive_scaling(coeffs, dt)
    rhs = explicit_rhs(u, bar_states, coeffs)

    return (scaling - 1.0) / dt * u + scaling / m * rhs
