"""Exception types raised across the package."""


class PTMachineError(Exception):
    """Base class for all package errors."""


class ValidationError(PTMachineError, ValueError):
    """A parameter violates its domain constraint."""


class RegimeError(PTMachineError):
    """A figure of merit was requested outside the regime where it is defined."""


class NumericError(PTMachineError):
    """Base class for numerical failures. ``stroke`` is set when raised inside a cycle."""

    stroke = None

    def with_stroke(self, stroke):
        self.stroke = stroke
        self.args = (f"stroke {stroke}: {self.args[0] if self.args else ''}",)
        return self


class TruncationError(NumericError):
    """Fock-space truncation holds too much population at the cutoff."""


class ConvergenceError(NumericError):
    """An iterative thermalization did not reach its tolerance."""


class StabilityError(NumericError):
    """An integrator step lost positivity or trace."""


class FirstLawError(NumericError):
    """Cycle energy bookkeeping does not close."""
