"""
Exception hierarchy.

ValidationError covers bad inputs (the CLI exits with code 1);
NumericalError covers numerical failures on valid inputs (exit code 2).
"""


class QcorrError(Exception):
    pass


class ValidationError(QcorrError, ValueError):
    pass


class NumericalError(QcorrError, ArithmeticError):
    pass


class NonSquare(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class NotOrthonormal(ValidationError):
    pass


class BadProbabilities(ValidationError):
    pass


class BadSigma(ValidationError):
    pass


class NotContraction(ValidationError):
    pass


class BadNormalization(ValidationError):
    pass


class BadRank(ValidationError):
    pass


class WrongShape(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class NotSSPPT(ValidationError):
    pass


class UnknownFamily(ValidationError):
    pass


class StateFileError(ValidationError):
    pass


class ProfileError(ValidationError):
    pass


class NoConvergence(NumericalError):
    pass


class NotCommutingFamily(NumericalError):
    pass


class NotPSDResidual(NumericalError):
    pass


class ReconstructionFailed(NumericalError):
    pass
