"""Exception hierarchy shared by all modules."""


class TorusBIEError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(TorusBIEError, ValueError):
    """Invalid user input: bad torus, bad tolerance, malformed config."""


class NumericalError(TorusBIEError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy result."""


class NonConvergent(NumericalError):
    pass


class SingularArgument(NumericalError):
    """Kernel evaluated at (or within the exclusion radius of) a lattice point."""


class InvalidCurve(ConfigurationError):
    pass


class OverlapError(ConfigurationError):
    pass


class AreaError(ConfigurationError):
    pass


class InvalidN(ConfigurationError):
    pass


class SingularSystem(NumericalError):
    pass


class NonZeroMeanData(ConfigurationError):
    pass


class EigensolverFailure(NumericalError):
    pass


class ParseError(ConfigurationError):
    """Expression syntax error.

    ``position`` is the byte offset into the source string and ``expected``
    the set of token descriptions that would have been accepted there.
    """

    def __init__(self, position, expected, source=""):
        self.position = position
        self.expected = frozenset(expected)
        self.source = source
        exp = ", ".join(sorted(self.expected)) or "end of input"
        super().__init__(f"parse error at offset {position}: expected {exp}")
