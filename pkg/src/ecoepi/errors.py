"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class EcoEpiError(Exception):
    """Base class for every error raised by :mod:`ecoepi`."""


class DivisorVanishes(EcoEpiError):
    pass


class LambdaOutOfRange(EcoEpiError):
    pass


class StepFailure(EcoEpiError):
    pass


class NonFiniteState(EcoEpiError):
    pass


class PositivityViolation(EcoEpiError):
    """A component of a trajectory started in the positive cone went below -1e-9."""


class NonContractive(EcoEpiError):
    pass


class DegenerateOrbit(EcoEpiError):
    pass


class ZeroDenominator(EcoEpiError):
    pass


class BracketFailure(EcoEpiError):
    pass


class RegimeMismatch(EcoEpiError):
    pass


class NewtonDivergence(EcoEpiError):
    """Newton shooting failed; ``best`` holds the iterate with the smallest residual."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class CollapsedToDiseaseFree(EcoEpiError):
    pass


class NonpositiveBound(EcoEpiError):
    pass


class HypothesisViolated(EcoEpiError):
    pass


class NoPositiveRoot(EcoEpiError):
    pass


class SignViolation(EcoEpiError):
    pass


class ValidationError(EcoEpiError):
    pass


class ParseError(EcoEpiError):
    """Config parse failure carrying one or more ``(line, column, message)`` entries."""

    def __init__(self, errors):
        self.errors = list(errors)
        text = "; ".join(f"line {ln}, col {col}: {msg}" for ln, col, msg in self.errors)
        super().__init__(text)
