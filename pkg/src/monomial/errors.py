"""Exception types raised across the package."""

from __future__ import annotations

from fractions import Fraction


class MonomialError(Exception):
    """Base class for every error this package raises on purpose."""


class ResonanceEncountered(MonomialError):
    """The diagonal operator vanished at an exponent it had to be inverted on."""

    def __init__(self, exponent: Fraction):
        self.exponent = Fraction(exponent)
        super().__init__(f"diagonal operator vanishes at exponent {self.exponent}")


class DepthExhausted(MonomialError):
    def __init__(self, depth: int):
        self.depth = depth
        super().__init__(f"cascade did not terminate or saturate within {depth} steps")


class NoDiagonalPart(MonomialError):
    def __init__(self, shift: int):
        self.shift = shift
        super().__init__(f"no term lands on the diagonal for shift {shift}")


class NegativeBaseFractionalPower(MonomialError, ValueError):
    pass


class NonRationalIndicialRoot(MonomialError):
    def __init__(self, approximations):
        self.approximations = tuple(approximations)
        super().__init__(f"indicial roots are not rational: {self.approximations}")


class SingularPoint(MonomialError, ValueError):
    pass


class UnknownFamily(MonomialError, KeyError):
    def __str__(self):
        return f"unknown family {self.args[0]!r}"


class MissingParameter(MonomialError, KeyError):
    def __str__(self):
        return f"missing parameter {self.args[0]!r}"


class ParseError(MonomialError):
    def __init__(self, line: int, column: int, expected: str):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"{line}:{column}: expected {expected}")


class UnboundParameter(MonomialError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.name = name
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: unbound parameter {name!r}")


class NonlinearTerm(MonomialError):
    def __init__(self, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: product of two y-factors is not linear")
