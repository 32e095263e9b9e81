"""M1 model physics: realizability, Eddington closure and fluxes.

States are stored as arrays whose last axis holds the conserved moments
``(psi0, psi1_1, ..., psi1_d)``; every function here is vectorised over the
leading axes, so a single state, a nodal field of shape ``(N, d+1)`` or an
edge array can be passed alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RealizabilityError

# upper bound of the wave speeds of the realizable M1 system
LAMBDA_MAX = 1.0

_ISOTROPIC_THRESHOLD = 1e-30


@dataclass(frozen=True)
class MomentState:
    psi0: float
    psi1: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.psi1)

    @property
    def flux_ratio(self) -> float:
        if self.psi0 <= 0:
            return np.inf

        return float(np.linalg.norm(self.psi1)) / self.psi0

    def to_array(self) -> np.ndarray:
        return np.array((self.psi0, *self.psi1), dtype=float)

    @classmethod
    def from_array(cls, u) -> MomentState:
        u = np.asarray(u, dtype=float)
        return cls(psi0=float(u[0]), psi1=tuple(float(v) for v in u[1:]))

    def __str__(self):
        psi1 = ", ".join(f"{v:.6e}" for v in self.psi1)
        return f"(psi0={self.psi0:.6e}, psi1=({psi1}), f={self.flux_ratio:.6e})"


def is_realizable(u, strict: bool = True) -> np.ndarray:
    """``psi0 > 0 and |psi1| < psi0`` (strict) or ``psi0 >= 0 and |psi1| <= psi0``."""
    u = np.asarray(u, dtype=float)
    psi0 = u[..., 0]
    norm2 = np.sum(u[..., 1:] ** 2, axis=-1)

    if strict:
        return (psi0 > 0.0) & (norm2 < psi0 * psi0)

    return (psi0 >= 0.0) & (norm2 <= psi0 * psi0)


def flux_ratio(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.linalg.norm(u[..., 1:], axis=-1) / u[..., 0]


def first_violation(u, strict: bool = True) -> Optional[int]:
    """Flat index of the first non-realizable state, or None."""
    ok = np.atleast_1d(is_realizable(u, strict=strict))
    if ok.all():
        return None

    return int(np.flatnonzero(~ok.ravel())[0])


def check_realizable(u, context: str, strict: bool = True):
    index = first_violation(u, strict=strict)
    if index is not None:
        states = np.asarray(u, dtype=float).reshape(-1, np.shape(u)[-1])
        raise RealizabilityError(context, index, MomentState.from_array(states[index]))


def eddington_factor(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if np.any(f < 0.0) or np.any(f > 1.0) or np.any(np.isnan(f)):
        raise ValueError("Eddington factor is defined for 0 <= f <= 1 only")

    f2 = f * f
    chi = (3.0 + 4.0 * f2) / (5.0 + 2.0 * np.sqrt(np.maximum(4.0 - 3.0 * f2, 0.0)))
    return chi[()]


def eddington_tensor(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    dim = v.shape[-1]

    v2 = np.sum(v * v, axis=-1)
    f = np.sqrt(v2)
    # round-off above the unit sphere
    f = np.where((f > 1.0) & (f < 1.0 + 1e-12), 1.0, f)
    chi = np.asarray(eddington_factor(f))

    # D(0) = I/3 by continuity, the anisotropic weight vanishes there
    safe = np.where(v2 < _ISOTROPIC_THRESHOLD, 1.0, v2)
    direction = np.where(
        (v2 < _ISOTROPIC_THRESHOLD)[..., None, None],
        0.0,
        v[..., :, None] * v[..., None, :] / safe[..., None, None],
    )

    isotropic = (0.5 * (1.0 - chi))[..., None, None] * np.eye(dim)
    anisotropic = (0.5 * (3.0 * chi - 1.0))[..., None, None] * direction

    return isotropic + anisotropic


def closure_psi2(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    psi0 = u[..., 0]

    # the cone boundary |psi1| = psi0 is allowed, f = 1 is in the domain of chi
    admissible = (psi0 > 0.0) & (np.sum(u[..., 1:] ** 2, axis=-1) <= psi0 * psi0)
    if not np.all(admissible):
        index = int(np.flatnonzero(~np.atleast_1d(admissible).ravel())[0])
        states = u.reshape(-1, u.shape[-1])
        raise RealizabilityError("closure", index, MomentState.from_array(states[index]))

    v = u[..., 1:] / psi0[..., None]

    # |v| <= 1 holds up to round-off after the check above
    norm = np.linalg.norm(v, axis=-1)
    v = v / np.maximum(norm, 1.0)[..., None]

    return psi0[..., None, None] * eddington_tensor(v)


def flux(u) -> np.ndarray:
    """Flux matrix of shape ``(..., d, d+1)``; row k is ``(psi1_k, psi2[k, :])``."""
    u = np.asarray(u, dtype=float)
    psi2 = closure_psi2(u)

    return np.concatenate((u[..., 1:, None], psi2), axis=-1)


def normal_flux(fluxes: np.ndarray, n) -> np.ndarray:
    return np.einsum("...k,...km->...m", np.asarray(n, dtype=float), fluxes)


def lax_friedrichs_flux(u_left, u_right, n) -> np.ndarray:
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)

    central = 0.5 * (normal_flux(flux(u_left), n) + normal_flux(flux(u_right), n))
    return central - 0.5 * LAMBDA_MAX * (u_right - u_left)


def moment_combination(u, nu) -> tuple[np.ndarray, np.ndarray]:
    """Moments ``u +/- (psi1.nu, psi2.nu)`` of ``(1 +/- nu.Omega) psi``."""
    u = np.asarray(u, dtype=float)
    nu = np.asarray(nu, dtype=float)
    shift = normal_flux(flux(u), nu)

    return u + shift, u - shift
