"""Exception hierarchy shared across the package.

Three families, mirrored by the CLI exit codes: violated preconditions
or hypotheses (exit 1), failed internal assertions that flag a bug
because the checked statement is a theorem (exit 2), and malformed
input (exit 3).
"""


class NovibarError(Exception):
    """Base class for all package errors."""


class HypothesisError(NovibarError):
    """A precondition or proposition hypothesis does not hold."""


class NotAUnit(HypothesisError):
    """Inversion was requested for a scalar of nonzero valuation."""


class ValuationOrder(HypothesisError):
    """Ring division with a numerator of smaller valuation than the pivot."""


class NotChainMap(HypothesisError):
    """A map fails to commute with the differentials (below precision)."""


class NonFiltered(HypothesisError):
    """A filtration drop is negative where non-negativity was required."""


class SeparationFailure(HypothesisError):
    """A cone spectrum does not split at sigma as asserted."""


class HypothesisFailure(HypothesisError):
    """A quantitative hypothesis of a deformation or bound check fails."""


class MismatchedMaslov(HypothesisError):
    """Product bound invoked on rings with different Maslov numbers."""


class PrecisionExhausted(HypothesisError):
    """A value could not be certified below the working precision."""


class AssertionFailure(NovibarError):
    """A proved identity failed to verify; indicates an implementation bug."""


class InputError(NovibarError):
    """Malformed external input."""


class FormatError(InputError):
    """A document violates the file format."""


class ValidationError(InputError):
    """A parsed object fails semantic validation."""
