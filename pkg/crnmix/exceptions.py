#!/usr/bin/env python3
"""
Common exceptions for crnmix
"""

from typing import Any, Dict, Optional, Sequence


class CRNError(Exception):
    """Base error raised by crnmix operations."""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary format."""
        return {
            "error": self.message,
            "type": self.__class__.__name__,
            "details": self.details,
        }


class UsageError(CRNError):
    """Bad command-line parameters."""

    exit_code = 1


class NetworkParseError(CRNError):
    """DSL text could not be turned into a network."""

    def __init__(self, message: str, line: int, column: int, text: str = ""):
        super().__init__(
            f"{line}:{column}: {message}",
            {"line": line, "column": column, "text": text},
        )
        self.line = line
        self.column = column


class NetworkError(CRNError):
    """Structurally invalid model input (unknown species, bad profile, ...)."""


class ResourceGuardError(CRNError):
    """A lattice box or enumeration would exceed the configured state cap."""

    exit_code = 3

    def __init__(self, states: int, cap: int, what: str = "box"):
        super().__init__(
            f"{what} has {states} states, above the configured cap of {cap}",
            {"states": states, "cap": cap, "what": what},
        )
        self.states = states
        self.cap = cap


class ExplosionGuardError(CRNError):
    """A trajectory fired more events than the configured cap."""

    exit_code = 3

    def __init__(self, x0: Sequence[int], t: float, events: int):
        super().__init__(
            f"event cap exceeded: {events} events before t={t} from x0={tuple(x0)}",
            {"x0": list(x0), "t": t, "events": events},
        )
        self.x0 = tuple(x0)
        self.t = t
        self.events = events


class ConvergenceError(CRNError):
    """Newton iteration did not reach the residual tolerance."""

    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})",
            {"iterations": iterations, "residual": residual},
        )
        self.iterations = iterations
        self.residual = residual


class SingularJacobianError(CRNError):
    """Jacobian of the mass-action field is singular at the current iterate."""

    def __init__(self, iterate: Sequence[float]):
        super().__init__(
            "singular Jacobian; retry from another initial guess",
            {"iterate": [float(v) for v in iterate]},
        )
        self.iterate = tuple(iterate)


class DistributionMismatchError(CRNError):
    """Two distributions cannot be compared on a common box."""
