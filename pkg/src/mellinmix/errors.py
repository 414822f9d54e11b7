"""Exception hierarchy.

Every error raised on purpose by the package derives from ``MellinMixError``.
The CLI maps the two broad families to exit codes: ``DomainError`` (bad
parameters, strip or feasibility violations) and ``DataError`` (bad
observations).
"""


class MellinMixError(Exception):
    pass


class DomainError(MellinMixError, ValueError):
    """A parameter lies outside its admissible domain."""


class ParameterError(DomainError):
    pass


class StripError(DomainError):
    """Re(z) is outside the strip of convergence of a Mellin transform."""


class PoleError(DomainError):
    pass


class DivisionHazardError(DomainError):
    """|M[G](z)| is too small to divide by."""


class FeasibilityError(DomainError):
    """The chosen u is not admissible for the mixing law."""


class UnsupportedFamilyError(DomainError):
    pass


class ConfigurationError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class IntegrabilityError(DomainError):
    pass


class DataError(MellinMixError, ValueError):
    """Observations violate a data requirement (e.g. non-positive values)."""


class SpecSyntaxError(ParameterError):
    """A distribution spec string is malformed (as opposed to out of range)."""
