"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["ReachOutsideWindow", "SolverError"]


class SolverError(RuntimeError):
    """A numerical routine failed to converge or to bracket a root."""


class ReachOutsideWindow(SolverError):
    """A coupling scan found no root inside the scanned beta window."""

    def __init__(self, message: str, beta_lo: float, beta_hi: float):
        super().__init__(message)
        self.beta_lo = beta_lo
        self.beta_hi = beta_hi
