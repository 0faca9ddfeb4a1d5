"""Exception types shared across the package."""


class PrismaticaError(Exception):
    """Base class for all errors raised by prismatica."""


class DimensionOutOfRange(PrismaticaError):
    pass


class IndexOutOfRange(PrismaticaError):
    pass


class NotClosedUnderFaces(PrismaticaError):
    pass


class UnorderedVertices(PrismaticaError):
    pass


class ShapeMismatch(PrismaticaError):
    pass


class InvalidPoint(PrismaticaError):
    pass


class InternalInvariantBroken(PrismaticaError):
    """Raised when a result violates an invariant that holds for valid input.

    Seeing this means a bug, not bad input.
    """


class NotFromComplex(PrismaticaError):
    pass


class NotAComplex(PrismaticaError):
    pass


class MissingEntry(PrismaticaError):
    pass


class UnsupportedFaceSpec(PrismaticaError):
    pass
