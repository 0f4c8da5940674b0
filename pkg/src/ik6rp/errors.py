"""Exception hierarchy for the solver and its I/O layer."""


class IKError(Exception):
    """Base class for all library errors."""


# --- algebra ---------------------------------------------------------------

class NotInvertible(IKError):
    pass


class BadAxis(IKError):
    pass


class NotRigid(IKError):
    pass


class ZeroPoint(IKError):
    pass


# --- polynomials -----------------------------------------------------------

class ZeroPolynomial(IKError):
    pass


class BothConstantInW(IKError):
    pass


class BothZero(IKError):
    pass


# --- constraint spaces / solver ---------------------------------------------

class DegeneracyError(IKError):
    """Chain or pose sits in a configuration the elimination cannot handle.

    The CLI maps every subclass to exit code 2.
    """


class DegenerateSegment(DegeneracyError):
    pass


class DegenerateChain(DegeneracyError):
    pass


class Unsupported(DegenerateChain):
    """Both candidate families on one side lie in the Study quadric."""


class NoParametrizedKernel(DegeneracyError):
    pass


class SingularSystem(DegeneracyError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class ZeroKernel(DegeneracyError):
    pass


class InternalInconsistency(DegeneracyError):
    pass


class UnsolvableLinear(DegeneracyError):
    pass


# --- I/O -------------------------------------------------------------------

class SchemaError(IKError):
    def __init__(self, message, row=None, field=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if field is not None:
            loc.append(f"field {field!r}")
        if loc:
            message = f"{', '.join(loc)}: {message}"
        super().__init__(message)
        self.row = row
        self.field = field


class NormalizationError(SchemaError):
    pass


class NotOnStudyQuadric(IKError):
    pass
