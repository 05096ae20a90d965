"""Exception hierarchy shared by the cdsim modules."""


class CdsError(Exception):
    """Base class for every error raised by cdsim."""


# machines
class SymbolOutOfAlphabet(CdsError):
    pass


class MachineSpecError(CdsError):
    pass


class ResourceBudgetExceeded(CdsError):
    pass


class MachineMismatch(CdsError):
    pass


# bit layout and codec
class AlphabetTooLarge(CdsError):
    pass


class MalformedLayout(CdsError):
    pass


class ShapeMismatch(CdsError):
    pass


class GapPoint(CdsError):
    pass


class BudgetExceeded(CdsError):
    pass


# disk map
class BlendZoneQuery(CdsError):
    pass


class BlendZoneCorner(CdsError):
    pass


class OutsideDomain(CdsError):
    pass


# virtual machine
class NoGuardMatches(CdsError):
    pass


class StepCapExceeded(CdsError):
    pass


class DivisionByZero(CdsError):
    pass


class ProgramSyntaxError(CdsError):
    pass


# polynomials and bounds
class ZeroPolynomial(CdsError):
    pass


class DegreeTooSmall(CdsError):
    pass


class NotSquare(CdsError):
    pass


class PolynomialSyntaxError(CdsError):
    pass


# census tools
class NonpositiveArea(CdsError):
    pass


# symbolic dynamics
class AlphabetMismatch(CdsError):
    pass


class WindowTooSmall(CdsError):
    pass
