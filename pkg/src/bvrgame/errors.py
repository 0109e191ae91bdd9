"""Exception hierarchy shared by the solvers, simulator and CLI."""

from __future__ import annotations


class GameError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(GameError, ValueError):
    pass


class NoConvergence(GameError, ArithmeticError):
    pass


class CoincidentAgents(DegenerateInput):
    pass


class OutsideOval(GameError, ValueError):
    pass


class DegenerateOval(DegenerateInput):
    pass


class VerticalBisector(GameError, ValueError):
    """Raised when the bisector of R1'R2' is the vertical line x = (x1' + x2') / 2."""

    def __init__(self, x: float):
        super().__init__(f"bisector is vertical at x = {x!r}")
        self.x = x


class InvalidSpeedRatio(GameError, ValueError):
    pass


class NoIntersection(GameError):
    """The two inner ovals do not cross; simultaneous blocking is impossible."""


class NoStationaryPoint(GameError):
    pass


class NoFeasibleHeading(GameError):
    pass


class InfeasibleHeading(GameError, ValueError):
    pass


class PathParallelToBisector(GameError):
    pass


class EmptyFeasibleSet(GameError):
    def __init__(self, message: str, bands=()):
        super().__init__(message)
        self.bands = tuple(bands)


class WrongTermination(GameError):
    pass


class SolverFailure(GameError):
    """A solver failed while the simulator was replaying state feedback."""

    def __init__(self, message: str, state: dict | None = None):
        super().__init__(message)
        self.state = state or {}


class ParseError(GameError, ValueError):
    pass


class ValidationError(GameError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
