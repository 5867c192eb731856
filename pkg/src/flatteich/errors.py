"""Exception hierarchy.

Every error names the offending element in its message so that fixture
authors can locate the problem without a debugger.
"""


class FlatteichError(ValueError):
    pass


# surface construction / validation
class NonClosingPolygon(FlatteichError):
    pass


class DegeneratePolygon(FlatteichError):
    pass


class BadPairing(FlatteichError):
    pass


class NonHalfTranslationAngle(FlatteichError):
    pass


class NonPositiveK(FlatteichError):
    pass


class ZeroArea(FlatteichError):
    pass


class UnknownCylinder(FlatteichError):
    pass


class ChartMismatch(FlatteichError):
    pass


# twist geodesics
class BadModulus(FlatteichError):
    pass


class BadK(FlatteichError):
    pass


class BadN(FlatteichError):
    pass


class FixtureIncomplete(FlatteichError):
    pass


# bounds
class EmptyFamily(FlatteichError):
    pass


class NotCore(FlatteichError):
    pass


class CertificationError(FlatteichError):
    """A produced bound violates lo <= hi; indicates a bug or a bad fixture."""


# lab
class AnnulusTouchesCore(FlatteichError):
    pass


class UnboundedLeg(FlatteichError):
    pass


class NotAMetric(FlatteichError):
    pass


# torus
class BadTau(FlatteichError):
    pass


# files
class ParseError(FlatteichError):
    pass


class ValidationFailure(FlatteichError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
