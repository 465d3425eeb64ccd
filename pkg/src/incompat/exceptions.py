"""Exception hierarchy shared by all modules."""


class IncompatError(ValueError):
    """Base class for invalid inputs and failed computations."""


class NotHermitian(IncompatError):
    pass


class DegenerateSpectrum(IncompatError):
    pass


class NonUnitBloch(IncompatError):
    pass


class DimensionMismatch(IncompatError):
    pass


class LengthMismatch(IncompatError):
    pass


class NonPrimeDimension(IncompatError):
    pass


class TooManyBases(IncompatError):
    pass


class InvalidSubspaceDim(IncompatError):
    pass


class InvalidOrder(IncompatError):
    pass


class InvalidState(IncompatError):
    pass


class InvalidPovm(IncompatError):
    pass


class AscentDiverged(IncompatError):
    pass


class SolverStalled(IncompatError):
    pass


class MissingReconstruction(IncompatError):
    pass


class OutOfRange(IncompatError):
    pass


class UnknownFigure(IncompatError):
    pass


class ParseError(IncompatError):
    pass
