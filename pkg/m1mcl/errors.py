from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .moments import MomentState


class M1Error(Exception):
    pass


class RealizabilityError(M1Error):
    def __init__(
        self,
        context: str,
        index: Optional[int] = None,
        state: Optional[MomentState] = None,
    ):
        self.context = context
        self.index = index
        self.state = state

        message = f"non-realizable state in {context}"
        if index is not None:
            message += f" at index {index}"
        if state is not None:
            message += f": {state}"

        super().__init__(message)


class CFLViolationError(M1Error):
    def __init__(self, dt: float, required_dt: float):
        self.dt = dt
        self.required_dt = required_dt
        super().__init__(f"time step {dt:.6e} violates the CFL bound {required_dt:.6e}")


class ConfigurationError(M1Error, ValueError):
    pass


class DivergenceError(M1Error):
    def __init__(self, step: int, residual: float, initial: float):
        self.step = step
        self.residual = residual
        self.initial = initial
        super().__init__(
            f"steady iteration diverged at step {step}: "
            f"residual {residual:.3e} > 1e3 x initial {initial:.3e}"
        )
