"""Exception hierarchy shared by the library and the command line front end."""


class TiltError(Exception):
    """Base class for every error raised on purpose by tiltbench."""


class PreconditionError(TiltError, ValueError):
    """A mathematical precondition of an operation does not hold."""


class AdmissibilityError(PreconditionError):
    """Threefold parameters violate a > alpha^2/6 + |b| alpha/2."""


class CertificationError(TiltError, ArithmeticError):
    """An interval certificate could not be produced at the requested width."""
