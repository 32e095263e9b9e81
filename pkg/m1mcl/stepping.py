"""Time integration: Heun SSP-RK2 with IMEX stages and a pseudo-time steady driver."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np

from .assembly import FemCoefficients, assemble_coefficients
from .errors import ConfigurationError, DivergenceError
from .limiter import limited_bar_states
from .loworder import (
    BarStates,
    BoundaryMode,
    StageResult,
    exterior_states,
    explicit_rhs,
    imex_euler_stage,
    low_order_bar_states,
    max_stable_dt,
)
from .mesh import Mesh, build_mesh
from .moments import check_realizable, flux_ratio, is_realizable
from .typed import Namespace

if TYPE_CHECKING:
    from .config import RunConfig
    from .scenarios.base import Scenario

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e3


class Scheme(str, Enum):
    LOW = "low"
    MCL = "mcl"
    # componentwise bounds only, without the realizability fix
    MCL_BOUNDS = "mcl-bounds"


@dataclass(repr=False)
class StepRecord(Namespace):
    step: int
    t: float
    mass: float
    min_psi0: float
    max_flux_ratio: float
    limited_fraction: float = 0.0


@dataclass(repr=False)
class ResidualRecord(Namespace):
    step: int
    pseudo_time: float
    residual_l2: float


@dataclass
class RunState:
    t: float
    step: int
    u: np.ndarray
    dt: float = 0.0
    residual_history: list[ResidualRecord] = field(default_factory=list)
    history: list[StepRecord] = field(default_factory=list)
    converged: Optional[bool] = None

    @property
    def max_flux_ratio(self) -> float:
        return max((record.max_flux_ratio for record in self.history), default=0.0)

    @property
    def min_psi0(self) -> float:
        return min((record.min_psi0 for record in self.history), default=np.inf)

    @property
    def residual(self) -> Optional[float]:
        if not self.residual_history:
            return None

        return self.residual_history[-1].residual_l2


@dataclass
class Discretization:
    mesh: Mesh
    coeffs: FemCoefficients
    boundary: BoundaryMode = BoundaryMode.NONE

    def boundary_states(self, u: np.ndarray) -> Optional[np.ndarray]:
        return exterior_states(u, self.boundary)

    def mass(self, u: np.ndarray) -> float:
        return float(np.dot(self.coeffs.lumped_mass, u[:, 0]))

    def record(self, state: RunState, limited_fraction: float = 0.0) -> StepRecord:
        u = state.u
        return StepRecord(
            step=state.step,
            t=state.t,
            mass=self.mass(u),
            min_psi0=float(np.min(u[:, 0])),
            max_flux_ratio=float(np.max(flux_ratio(u))),
            limited_fraction=limited_fraction,
        )


def discretize(scenario: Scenario, nodes: Optional[int] = None) -> Discretization:
    nodes = nodes or scenario.nodes
    mesh = build_mesh(scenario.lower, scenario.upper, nodes - 1)
    coeffs = assemble_coefficients(mesh, scenario)

    source = coeffs.source
    if np.any(~is_realizable(source, strict=False)):
        raise ConfigurationError(f"scenario {scenario.name!r} has an inadmissible source")

    return Discretization(mesh=mesh, coeffs=coeffs, boundary=scenario.boundary)


def initial_state(scenario: Scenario, mesh: Mesh) -> np.ndarray:
    u0 = np.asarray(scenario.initial(mesh.points), dtype=float)
    if np.any(~is_realizable(u0)):
        raise ConfigurationError(
            f"initial condition of scenario {scenario.name!r} is not strictly realizable"
        )

    return u0


def compute_dt(coeffs: FemCoefficients, cfl: float) -> float:
    if coeffs.n_nodes == 0 or coeffs.n_edges == 0:
        raise ConfigurationError("cannot compute a time step on an empty mesh")
    if not 0.0 < cfl <= 1.0:
        raise ConfigurationError(f"cfl must lie in (0, 1], got {cfl}")

    return cfl * max_stable_dt(coeffs)


def stage_bar_states(
    u: np.ndarray,
    coeffs: FemCoefficients,
    scheme: Scheme,
    boundary_states: Optional[np.ndarray] = None,
) -> tuple[BarStates, float]:
    """Bar states of the chosen scheme and the share of limited edges."""
    scheme = Scheme(scheme)
    if scheme is Scheme.LOW:
        return low_order_bar_states(u, coeffs), 0.0

    result = limited_bar_states(
        u,
        coeffs,
        fix=scheme is Scheme.MCL,
        boundary_states=boundary_states,
    )
    return result.bars, result.limited_fraction


def stage(
    u: np.ndarray,
    dt: float,
    coeffs: FemCoefficients,
    scheme: Scheme = Scheme.MCL,
    boundary: BoundaryMode = BoundaryMode.NONE,
) -> StageResult:
    boundary_states = exterior_states(u, boundary)
    bars, fraction = stage_bar_states(u, coeffs, scheme, boundary_states)

    result = imex_euler_stage(u, dt, coeffs, bars, boundary_states)
    result.limited_fraction = fraction
    return result


def heun_step(
    u: np.ndarray,
    dt: float,
    coeffs: FemCoefficients,
    scheme: Scheme = Scheme.MCL,
    boundary: BoundaryMode = BoundaryMode.NONE,
) -> np.ndarray:
    return _heun(u, dt, coeffs, scheme, boundary).u


def _heun(u, dt, coeffs, scheme, boundary) -> StageResult:
    first = stage(u, dt, coeffs, scheme, boundary)
    second = stage(first.u, dt, coeffs, scheme, boundary)

    u_new = 0.5 * u + 0.5 * second.u
    check_realizable(u_new, "Heun combination")
    return StageResult(
        u=u_new,
        dt=dt,
        limited_fraction=0.5 * (first.limited_fraction + second.limited_fraction),
    )


def steady_residual(
    u: np.ndarray,
    coeffs: FemCoefficients,
    bars: BarStates,
    boundary_states: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Nodal time derivative of the semi-discrete scheme with the given bar states."""
    rhs = explicit_rhs(u, bars, coeffs, boundary_states) - coeffs.lumped_sigma() * u
    return rhs / coeffs.lumped_mass[:, None]


def residual_norm(r: np.ndarray, coeffs: FemCoefficients) -> float:
    """L2 norm of the finite element function with nodal values ``r``."""
    r = np.asarray(r, dtype=float)
    value = np.sum(r * (coeffs.consistent_mass @ r))

    return float(np.sqrt(max(value, 0.0)))


def _log_progress(state: RunState, record: StepRecord, extra: str = ""):
    logger.info(
        "step %6d  t=%.6e  dt=%.3e  mass=%.12e  min psi0=%.3e  max f=%.12f%s",
        state.step,
        state.t,
        state.dt,
        record.mass,
        record.min_psi0,
        record.max_flux_ratio,
        extra,
    )


def run_transient(
    config: RunConfig,
    scenario: Scenario,
    callback: Optional[Callable[[RunState, Discretization], None]] = None,
    discretization: Optional[Discretization] = None,
) -> RunState:
    """Heun steps until ``t_final`` is hit exactly; the last step is clipped."""
    config = config.resolved(scenario)
    if config.t_final is None or config.t_final <= 0.0:
        raise ConfigurationError("a transient run needs t_final > 0")

    discretization = discretization or discretize(scenario, config.nodes)
    coeffs = discretization.coeffs
    dt = compute_dt(coeffs, config.cfl)
    logger.info(
        "transient %s: scheme=%s dt=%.6e t_final=%g",
        scenario.name,
        config.scheme.value,
        dt,
        config.t_final,
    )

    state = RunState(t=0.0, step=0, u=initial_state(scenario, discretization.mesh), dt=dt)
    state.history.append(discretization.record(state))
    if callback is not None:
        callback(state, discretization)

    t_final = config.t_final
    while state.t < t_final:
        remaining = t_final - state.t
        # absorb round-off so the run does not end with a vanishing step
        last = remaining <= dt * (1.0 + 1e-10)
        step_dt = min(remaining, dt)

        result = _heun(state.u, step_dt, coeffs, config.scheme, discretization.boundary)
        state.u = result.u
        state.step += 1
        state.dt = step_dt
        state.t = t_final if last else state.t + step_dt

        record = discretization.record(state, result.limited_fraction)
        state.history.append(record)
        if state.step % config.log_every == 0 or state.t >= t_final:
            _log_progress(state, record)
        if callback is not None:
            callback(state, discretization)

    logger.info(
        "finished %s after %d steps, max f over the run %.12f",
        scenario.name,
        state.step,
        state.max_flux_ratio,
    )
    return state


def run_steady(
    config: RunConfig,
    scenario: Scenario,
    callback: Optional[Callable[[RunState, Discretization], None]] = None,
    discretization: Optional[Discretization] = None,
) -> RunState:
    """Single-stage IMEX pseudo-time stepping until the residual drops below ``tol``.

    The residual of a step is evaluated with the same limited bar states that
    advance it, before the update.
    """
    config = config.resolved(scenario)
    discretization = discretization or discretize(scenario, config.nodes)
    coeffs = discretization.coeffs
    dt = compute_dt(coeffs, config.cfl)
    logger.info(
        "steady %s: scheme=%s dt=%.6e tol=%.1e max steps=%d",
        scenario.name,
        config.scheme.value,
        dt,
        config.tol,
        config.max_steps,
    )

    state = RunState(t=0.0, step=0, u=initial_state(scenario, discretization.mesh), dt=dt)
    initial = None
    while True:
        boundary_states = discretization.boundary_states(state.u)
        bars, fraction = stage_bar_states(state.u, coeffs, config.scheme, boundary_states)
        residual = residual_norm(steady_residual(state.u, coeffs, bars, boundary_states), coeffs)
        state.residual_history.append(
            ResidualRecord(step=state.step, pseudo_time=state.t, residual_l2=residual)
        )

        record = discretization.record(state, fraction)
        state.history.append(record)
        if state.step % config.log_every == 0:
            _log_progress(state, record, f"  residual={residual:.6e}")

        if initial is None:
            initial = residual
        if residual <= config.tol:
            state.converged = True
            break
        if residual > DIVERGENCE_FACTOR * initial:
            raise DivergenceError(state.step, residual, initial)
        if state.step >= config.max_steps:
            state.converged = False
            logger.warning(
                "%s did not converge in %d steps, residual %.6e > tol %.1e",
                scenario.name,
                state.step,
                residual,
                config.tol,
            )
            break

        state.u = imex_euler_stage(state.u, dt, coeffs, bars, boundary_states).u
        state.step += 1
        state.t += dt
        if callback is not None:
            callback(state, discretization)

    if state.converged:
        logger.info(
            "%s converged after %d steps, residual %.6e", scenario.name, state.step, state.residual
        )
    return state
