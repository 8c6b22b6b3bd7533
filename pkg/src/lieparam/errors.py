"""Exception hierarchy shared by all modules."""


class LieParamError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(LieParamError):
    """Malformed expression source; ``offset`` is a byte offset into the UTF-8 text."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownFunction(ExprSyntaxError):
    pass


class UndeclaredSymbol(ExprSyntaxError):
    pass


class UnboundSymbol(LieParamError):
    def __init__(self, name):
        super().__init__(f"unbound symbol {name!r}")
        self.name = name


class DomainFault(LieParamError, ArithmeticError):
    """Evaluation left the domain of an operation (pole, negative sqrt, overflow)."""

    def __init__(self, message, node=None, point=None):
        detail = message
        if node is not None:
            detail += f" in {node}"
        if point is not None:
            detail += f" at {point}"
        super().__init__(detail)
        self.node = node
        self.point = point


class OverflowRisk(LieParamError):
    pass


class DimensionMismatch(LieParamError, ValueError):
    pass


class Unsupported(LieParamError, NotImplementedError):
    pass


class SingularParametrization(LieParamError, ArithmeticError):
    pass


class RangeEscape(LieParamError):
    pass


class NotProjectable(LieParamError):
    pass


class NotInvertible(LieParamError):
    """The map that has to be inverted is not injective; ``report`` carries the witness."""

    def __init__(self, report, message=None):
        super().__init__(message or f"map is not invertible: {report}")
        self.report = report


class NotGraph(NotInvertible):
    """The first component of a parametrization is not injective."""


class Inconclusive(LieParamError):
    def __init__(self, report, message=None):
        super().__init__(message or f"invertibility is inconclusive: {report}")
        self.report = report


class ConfigError(LieParamError):
    """Invalid scenario or command configuration; ``path`` names the offending field."""

    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
