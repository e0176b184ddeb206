"""Exception types shared across the package."""


class TetraTVError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class InputError(TetraTVError):
    exit_code = 2


class PreconditionError(TetraTVError):
    exit_code = 3


class ParseError(InputError):
    pass


class NotTypical(PreconditionError):
    pass


class FlavorMismatch(PreconditionError):
    pass


class DimZero(PreconditionError):
    pass


class DimAmbiguous(PreconditionError):
    pass


class NotScalar(TetraTVError):
    """A cut evaluation did not come out proportional to the identity."""


class TypeMismatch(PreconditionError):
    pass


class NoTypicalColor(PreconditionError):
    pass


class NotGood(PreconditionError):
    pass


class HypothesisViolated(PreconditionError):
    pass


class GradeMismatch(PreconditionError):
    pass


class WrongRoot(PreconditionError):
    pass


class ForbiddenGrade(PreconditionError):
    pass


class NotClosed(InputError):
    pass


class NotOrientable(InputError):
    pass


class NotQuasiRegular(InputError):
    pass


class NotHamiltonian(InputError):
    pass


class MissingEdge(InputError):
    pass


class NotCocycle(PreconditionError):
    pass


class BadSite(PreconditionError):
    pass


class LinkObstruction(PreconditionError):
    pass


class AdmissibilityLost(PreconditionError):
    pass


class NoLinkEdge(PreconditionError):
    pass


class NotAdmissible(PreconditionError):
    pass


class Overflow(PreconditionError):
    pass
