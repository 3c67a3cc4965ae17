"""Exception hierarchy shared by every simulation package.

Library code raises these; the CLI layer maps them onto exit codes.
"""

from __future__ import annotations

from typing import Any, List, Optional, Sequence


class JunctionSimError(Exception):
    """Base class for all errors raised by the simulator."""


class DomainError(JunctionSimError, ValueError):
    """Input lies outside the domain where the requested quantity exists."""


class PoleError(JunctionSimError):
    """Evaluation at a coordinate singularity (|z| -> 1 in the canonical chart)."""


class BracketError(JunctionSimError):
    """No sign change of the bisection target inside the search bracket.

    Attributes:
        scanned (List[tuple[float, float]]): The (parameter, target value) pairs
            scanned before giving up.
    """

    def __init__(self, message: str, scanned: Sequence[tuple[float, float]]) -> None:
        super().__init__(message)
        self.scanned = list(scanned)


class RootFindingError(JunctionSimError):
    """Newton iteration from a given seed did not converge."""

    def __init__(self, message: str, seed: Optional[Sequence[float]] = None) -> None:
        super().__init__(message)
        self.seed = None if seed is None else list(seed)


class SingularInputError(JunctionSimError):
    """Closed-form expression evaluated at a singular argument."""


class EmptyRegionError(JunctionSimError):
    """Phase-space region for ensemble sampling has zero measure."""


class StepSizeError(JunctionSimError):
    """Time step too large for the requested scheme."""


class FitError(JunctionSimError):
    """Log-linear fit impossible (non-positive values in the fit window)."""


class IntegratorError(JunctionSimError):
    """ODE integrator reported a failure."""


class PositivityError(JunctionSimError):
    """Density matrix has an eigenvalue below the positivity tolerance."""


class GridError(JunctionSimError):
    """Time grid is not uniform where a uniform grid is required."""


class SizeBudgetError(JunctionSimError):
    """Dense superoperator would exceed the memory budget.

    Attributes:
        required_bytes (int): Memory the dense matrix would need.
        budget_bytes (int): The configured budget.
    """

    def __init__(self, required_bytes: int, budget_bytes: int, what: str = "Dense Liouvillian") -> None:
        super().__init__(f"{what} needs {required_bytes} bytes, budget is {budget_bytes} bytes.")
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes


class SymmetryError(JunctionSimError):
    """Operator fails to commute with the species-exchange symmetry."""


class SpectrumSizeError(JunctionSimError):
    """Too few eigenvalues for the requested statistics."""


class ConfigError(JunctionSimError):
    """Experiment configuration failed validation.

    Attributes:
        fields (List[str]): Human-readable description of every offending field.
    """

    def __init__(self, message: str, fields: Optional[List[str]] = None) -> None:
        self.fields = fields or []
        details = "".join(f"\n  - {field}" for field in self.fields)
        super().__init__(message + details)

    @classmethod
    def from_pydantic(cls, error: Any, source: str = "config") -> ConfigError:
        """Flattens a pydantic ``ValidationError`` into a ``ConfigError``.

        Args:
            error (Any): The pydantic validation error.
            source (str): Name of the validated document, used in the message.

        Returns:
            ConfigError: An error listing every offending field path.
        """
        fields = [
            f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}"
            for item in error.errors()
        ]
        return cls(f"Invalid {source}: {len(fields)} field(s) failed validation.", fields)
