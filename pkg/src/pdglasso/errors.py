"""Exception types raised by the library."""


class PdglassoError(Exception):
    """Base class for all library errors."""


class DimensionError(PdglassoError):
    """Inputs have incompatible or invalid dimensions."""


class NotPositiveDefiniteError(PdglassoError):
    """A matrix required to be positive definite is not."""


class MleError(PdglassoError):
    """Constrained maximum likelihood estimate does not exist or did not converge."""


class InputError(PdglassoError):
    """Malformed user input (files, flags)."""
