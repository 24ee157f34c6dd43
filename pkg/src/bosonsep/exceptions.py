"""Exception hierarchy shared by every module of the package."""


class BosonSepError(Exception):
    """Base class for all errors raised by :mod:`bosonsep`."""


class ZeroSymmetrization(BosonSepError):
    """The symmetric part of the input tensor vanishes."""


class NotUnitary(BosonSepError):
    pass


class DimensionMismatch(BosonSepError):
    pass


class NonSymmetricInput(BosonSepError):
    pass


class NotAProperty(BosonSepError):
    """The vector does not split off the state as a symmetrized factor."""


class InconsistentGram(BosonSepError):
    """Pairwise relations that no three vectors can realize."""


class UnknownName(BosonSepError):
    pass


class BadParams(BosonSepError):
    pass


class StateFileError(BosonSepError):
    """Parse or validation failure while reading a state file."""
