# errors.py


class IndexLabError(Exception):
    """Base class for everything raised on purpose by this project."""


class InputError(IndexLabError):
    """A request that cannot be served: malformed job or unmet precondition."""


class VerificationError(IndexLabError):
    """
    A numerical invariant did not hold.
    Carries the invariant name and the residual that broke it.
    """

    def __init__(self, invariant, residual=None, message=None):
        self.invariant = invariant
        self.residual = residual
        text = message or invariant
        if residual is not None:
            text = f"{text} (residual {residual:.3e})"
        super().__init__(text)


class SpecError(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class NotSubalgebra(InputError):
    pass


class NotIntermediate(InputError):
    pass


class DegenerateIntermediate(InputError):
    pass


class NotASubgroup(InputError):
    pass


class TensorSizeExceeded(InputError):
    pass


class TraceNotFaithful(InputError):
    pass


class NotUnital(InputError):
    pass


class NotInBasicConstruction(InputError):
    pass


class NotAnAlgebra(VerificationError):
    pass


class DegenerateModule(VerificationError):
    pass


class NotCentral(VerificationError):
    pass


class SearchDidNotConverge(VerificationError):
    pass


class InconsistentExtension(VerificationError):
    pass


class DegeneratePerron(VerificationError):
    pass


class CorrespondenceViolation(VerificationError):
    pass


class IndexNotScalar(VerificationError):
    pass
