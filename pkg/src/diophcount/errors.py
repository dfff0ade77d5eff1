"""Exception types raised across the package."""


class DiophantineError(Exception):
    """Base class for every error raised by diophcount."""


class EquationSyntaxError(DiophantineError):
    def __init__(self, message, position, text=""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at offset {position}")


class UnknownVariable(DiophantineError):
    pass


class UnsupportedConstruct(DiophantineError):
    pass


class NotAlgebraic(DiophantineError):
    pass


class AllZero(DiophantineError):
    pass


class ConstantPolynomial(DiophantineError):
    pass


class NotMonotoneCase(DiophantineError):
    pass


class ZeroConstantTerm(DiophantineError):
    pass


class NotQuadratic(DiophantineError):
    pass


class NotExplicit(DiophantineError):
    pass


class CountExceedsBox(DiophantineError):
    pass


class Case1NoAsymptote(DiophantineError):
    pass
