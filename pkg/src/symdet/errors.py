"""Exception hierarchy for symdet."""


class SymDetError(Exception):
    """Base class for every error raised by this package."""


class DegeneracyError(SymDetError):
    """Input is too close to a non-generic configuration to decide reliably."""


class RegimeMismatch(SymDetError):
    pass


class NoConvergence(DegeneracyError):
    pass


class LeadingZero(SymDetError):
    pass


class SingularInput(DegeneracyError):
    pass


class DegeneratePencil(DegeneracyError):
    pass


class IsotropicEigenvector(DegeneracyError):
    pass


class AmbiguousSigns(DegeneracyError):
    pass


class WitnessResidualError(DegeneracyError):
    """A computed congruence witness failed its residual re-check."""


class ZeroPolynomial(SymDetError):
    pass


class BadIndexSet(SymDetError):
    pass


class RejectionCapExceeded(SymDetError):
    pass


class NotInU(SymDetError):
    def __init__(self, which: str = "A"):
        super().__init__(f"tuple {which} is not in U_(r,n)")
        self.which = which


class NotSpanning(SymDetError):
    pass


class InconsistentValues(SymDetError):
    pass


class DegenerateSampling(SymDetError):
    pass


class SchemaError(SymDetError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class BadRational(SchemaError):
    pass
