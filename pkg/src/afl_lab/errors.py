"""Exception hierarchy shared by all modules."""


class AflLabError(Exception):
    pass


class DivisionByZero(AflLabError, ZeroDivisionError):
    pass


class ZeroArgument(AflLabError, ValueError):
    pass


class NotIntegral(AflLabError, ValueError):
    pass


class ZeroPolynomial(AflLabError, ValueError):
    pass


class ZeroConstantTerm(AflLabError, ValueError):
    pass


class NotSelfReciprocalInput(AflLabError, ValueError):
    pass


class NotFullRank(AflLabError, ValueError):
    pass


class SingularMatrix(AflLabError, ValueError):
    pass


class DegeneratePairing(AflLabError, ValueError):
    pass


class NotContained(AflLabError, ValueError):
    pass


class NotStable(AflLabError, ValueError):
    pass


class MissingStructure(AflLabError, ValueError):
    pass


class ComplexityExceeded(AflLabError, RuntimeError):
    """A configured enumeration cap was hit; no partial answer is returned."""


class NotRegularSemisimple(AflLabError, ValueError):
    pass


class InconsistentMoments(AflLabError, ValueError):
    pass


class SamplingExhausted(AflLabError, RuntimeError):
    pass


class NotMinuscule(AflLabError, ValueError):
    pass


class WrongSide(AflLabError, ValueError):
    pass


class UnsupportedRank(AflLabError, ValueError):
    pass


class BoundOverflow(AflLabError, RuntimeError):
    pass


class ConfigInvalid(AflLabError, ValueError):
    pass
