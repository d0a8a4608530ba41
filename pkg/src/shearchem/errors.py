"""Exception types shared across the package.

CLI exit codes: ConfigError -> 2, SolverDiverged -> 3, AllTimedOut -> 4.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """One or more parameter invariants violated; carries every violation."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid parameters:\n  " + "\n  ".join(self.problems))


class SolverDiverged(RuntimeError):
    """Iterative field solve stagnated; usually the grid is too coarse for A."""

    def __init__(self, message: str, peclet: float):
        super().__init__(f"{message} (advective cell number A*h = {peclet:.3g})")
        self.peclet = peclet


class AllTimedOut(RuntimeError):
    """Every trajectory of an ensemble timed out; t_max is too small."""


class DomainError(ValueError):
    """Evaluation point outside the domain of a 1D hitting-time expression."""


class InsufficientRows(ValueError):
    """Not enough usable sweep rows for an argmin/plateau search."""
