"""Typed error hierarchy shared by all solvers."""


class BecLabError(Exception):
    """Base class for all package errors."""


class ConfigInvalid(BecLabError):
    pass


class SolverFailure(BecLabError):
    """Base class for numerical failures surfaced by the CLI as exit code 3."""


class NonPositiveMu(SolverFailure, ValueError):
    pass


class StepTooCoarse(SolverFailure):
    pass


class InvalidPotential(SolverFailure, ValueError):
    pass


class GridMismatch(SolverFailure, ValueError):
    pass


class NegativeResult(SolverFailure):
    pass


class BracketFailure(SolverFailure):
    pass


class NodeDetected(SolverFailure):
    pass


class NonMonotoneEta(SolverFailure):
    pass


class UnresolvedKernel(SolverFailure):
    pass


class StabilityViolation(SolverFailure):
    pass


class NaNDetected(SolverFailure):
    pass


class InsufficientSnapshots(SolverFailure):
    pass


class CFLViolation(SolverFailure):
    pass


class NewtonDivergence(SolverFailure):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class PastCaustic(SolverFailure):
    pass


class DesyncedTrajectories(SolverFailure):
    pass


class UnresolvedSupport(SolverFailure):
    pass


class QuadratureSingular(SolverFailure):
    pass


class AcceptanceFailure(BecLabError):
    def __init__(self, failing):
        super().__init__("failing criteria: " + ", ".join(map(str, failing)))
        self.failing = list(failing)
