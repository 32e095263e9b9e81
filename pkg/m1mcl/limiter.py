"""Monolithic convex limiting of the antidiffusive edge fluxes.

Each undirected edge stores one flux ``f_ij``; the flux seen from node j is
``-f_ij``, so every stage of the pipeline is skew-symmetric by construction.
Limiting happens in two passes: componentwise local bounds on the bar states,
then a scalar back-scaling that keeps ``|psi1| < psi0`` for both bar states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import FemCoefficients
from .errors import RealizabilityError
from .loworder import BarStates, explicit_rhs, low_order_bar_states
from .moments import MomentState, check_realizable, flux

logger = logging.getLogger(__name__)

IDP_MARGIN = 1e-15


@dataclass
class LocalBounds:
    lower: np.ndarray
    upper: np.ndarray


@dataclass
class EdgeFlux:
    raw: np.ndarray
    limited: np.ndarray
    alpha: np.ndarray


@dataclass
class LimiterResult:
    bars: BarStates
    low: BarStates
    fluxes: EdgeFlux
    bounds: LocalBounds
    udot: np.ndarray

    @property
    def limited_fraction(self) -> float:
        """Share of edges whose flux was reduced by either pass."""
        if len(self.fluxes.raw) == 0:
            return 0.0

        changed = np.any(self.fluxes.limited != self.fluxes.raw, axis=-1)
        return float(np.mean(changed))


def low_order_time_derivative(
    u: np.ndarray,
    coeffs: FemCoefficients,
    bars: Optional[BarStates] = None,
    boundary_states: Optional[np.ndarray] = None,
) -> np.ndarray:
    if bars is None:
        bars = low_order_bar_states(u, coeffs)

    rhs = explicit_rhs(u, bars, coeffs, boundary_states) - coeffs.lumped_sigma() * u
    return rhs / coeffs.lumped_mass[:, None]


def raw_antidiffusive_fluxes(
    u: np.ndarray, udot: np.ndarray, coeffs: FemCoefficients
) -> np.ndarray:
    i, j = coeffs.edges.T
    damping = coeffs.viscosity[:, None] + coeffs.edge_sigma()

    return coeffs.mass[:, None] * (udot[i] - udot[j]) + damping * (u[i] - u[j])


def compute_local_bounds(
    u: np.ndarray, bars: BarStates, coeffs: FemCoefficients
) -> LocalBounds:
    i, j = coeffs.edges.T
    lower = u.copy()
    upper = u.copy()

    for node, neighbour, bar in ((i, u[j], bars.ij), (j, u[i], bars.ji)):
        np.minimum.at(lower, node, neighbour)
        np.minimum.at(lower, node, bar)
        np.maximum.at(upper, node, neighbour)
        np.maximum.at(upper, node, bar)

    return LocalBounds(lower=lower, upper=upper)


def limit_componentwise(
    f_raw: np.ndarray,
    bounds: LocalBounds,
    bars: BarStates,
    coeffs: FemCoefficients,
) -> np.ndarray:
    i, j = coeffs.edges.T
    d2 = 2.0 * coeffs.viscosity[:, None]

    increase = d2 * np.minimum(bounds.upper[i] - bars.ij, bars.ji - bounds.lower[j])
    decrease = d2 * np.maximum(bounds.lower[i] - bars.ij, bars.ji - bounds.upper[j])

    return np.where(
        f_raw > 0.0,
        np.minimum(f_raw, increase),
        np.maximum(f_raw, decrease),
    )


def _quadratic_coefficients(f_star, bar, d_ij):
    f0, f1 = f_star[..., 0], f_star[..., 1:]
    psi0, psi1 = bar[..., 0], bar[..., 1:]

    a = np.sum(f1 * f1, axis=-1) - f0 * f0
    b = 4.0 * d_ij * (np.sum(psi1 * f1, axis=-1) - psi0 * f0)
    q = (2.0 * d_ij) ** 2 * (psi0 * psi0 - np.sum(psi1 * psi1, axis=-1))
    return a, b, q


def quadratic_constraint(alpha, f_star, bar, d_ij) -> tuple[np.ndarray, np.ndarray]:
    """``(P(alpha), Q)``; the corrected bar state is realizable iff ``P < Q``."""
    a, b, q = _quadratic_coefficients(
        np.asarray(f_star, dtype=float),
        np.asarray(bar, dtype=float),
        np.asarray(d_ij, dtype=float),
    )
    alpha = np.asarray(alpha, dtype=float)

    return a * alpha * alpha + b * alpha, q


def idp_fix(f_star, bar_ij, bar_ji, d_ij) -> tuple[np.ndarray, np.ndarray]:
    """Scalar correction factor keeping both corrected bar states realizable.

    ``P(alpha) <= alpha * R`` on [0, 1], so clipping ``alpha`` to ``Q~ / R``
    wherever ``R > Q~ = (1 - eps) Q`` enforces ``P < Q`` on both sides.
    """
    f_star = np.asarray(f_star, dtype=float)
    d_ij = np.asarray(d_ij, dtype=float)

    alpha = np.ones(f_star.shape[:-1])
    for bar, sign in ((bar_ij, 1.0), (bar_ji, -1.0)):
        bar = np.asarray(bar, dtype=float)
        a, b, q = _quadratic_coefficients(sign * f_star, bar, d_ij)

        if np.any(q <= 0.0):
            index = int(np.flatnonzero(np.atleast_1d(q <= 0.0))[0])
            state = np.reshape(bar, (-1, bar.shape[-1]))[index]
            raise RealizabilityError("IDP fix", index, MomentState.from_array(state))

        r = np.maximum(a, 0.0) + b
        q_tilde = (1.0 - IDP_MARGIN) * q
        clip = r > q_tilde
        alpha = np.where(clip, np.minimum(alpha, q_tilde / np.where(clip, r, 1.0)), alpha)

    return alpha[()], alpha[..., None] * f_star


def limited_bar_states(
    u: np.ndarray,
    coeffs: FemCoefficients,
    *,
    limit: bool = True,
    fix: bool = True,
    boundary_states: Optional[np.ndarray] = None,
) -> LimiterResult:
    """Flux-corrected bar states of every edge.

    ``limit=False`` skips the componentwise pass and ``fix=False`` the
    realizability pass; with both disabled the target scheme is recovered.
    """
    check_realizable(u, "limiter input")

    low = low_order_bar_states(u, coeffs, flux(u))
    udot = low_order_time_derivative(u, coeffs, low, boundary_states)
    raw = raw_antidiffusive_fluxes(u, udot, coeffs)
    bounds = compute_local_bounds(u, low, coeffs)

    limited = limit_componentwise(raw, bounds, low, coeffs) if limit else raw
    if fix:
        alpha, limited = idp_fix(limited, low.ij, low.ji, coeffs.viscosity)
    else:
        alpha = np.ones(len(raw))

    d2 = 2.0 * coeffs.viscosity[:, None]
    bars = BarStates(ij=low.ij + limited / d2, ji=low.ji - limited / d2)
    if fix:
        check_realizable(bars.ij, "limited bar states", strict=False)
        check_realizable(bars.ji, "limited bar states", strict=False)

    result = LimiterResult(
        bars=bars,
        low=low,
        fluxes=EdgeFlux(raw=raw, limited=limited, alpha=np.atleast_1d(alpha)),
        bounds=bounds,
        udot=udot,
    )
    logger.debug("limiter: %.1f%% of edges corrected", 100.0 * result.limited_fraction)
    return result
