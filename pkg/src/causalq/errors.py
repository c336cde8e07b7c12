"""Exception types shared across the package."""


class CausalqError(Exception):
    """Base class for all package errors."""


class SiteMismatch(CausalqError):
    """A region, slice or foliation was used with a site it does not belong to."""


class NotSpacelike(CausalqError):
    """Two regions that were required to be spacelike-separated are not."""


class NoFoliationFound(CausalqError):
    """The site is too small or too constrained to separate the given regions."""


class NonIsometry(CausalqError):
    """A bijection on event ids fails to preserve the causal order both ways."""


class DimensionMismatch(CausalqError):
    """Operator or state dimensions do not agree."""


class UnknownOutcome(CausalqError):
    """An outcome label is not present in the measurement family."""


class ZeroProbabilityBranch(CausalqError):
    """A selective update was requested on an outcome with (numerically) zero
    Born probability.  This signals a forbidden branch, not a bug."""


class ZeroProduct(CausalqError):
    """An operator product vanished, so no relative phase is defined."""


class NotPSD(CausalqError):
    """An effect has a negative eigenvalue beyond tolerance."""


class LayoutMismatch(CausalqError):
    """A tensor-factor layout is inconsistent with the operator placed on it."""


class FoliationMismatch(CausalqError):
    """A foliation does not fit the scenario it was asked to drive."""


class BadCausalPlacement(CausalqError):
    """Regions of a signalling chain do not have the required causal relations."""


class SchemaError(CausalqError):
    """A site, scenario or query file violates the input schema."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
