"""Exception types shared across the package."""


class QDTError(Exception):
    """Base class for all package errors."""


class ParseError(QDTError):
    """Malformed JSON input. `path` locates the offending element."""

    def __init__(self, message: str, path: str = "", line: int | None = None, col: int | None = None):
        self.path = path
        self.line = line
        self.col = col
        where = []
        if line is not None:
            where.append(f"line {line} col {col}")
        if path:
            where.append(path)
        super().__init__(f"{message}" + (f" at {', '.join(where)}" if where else ""))


class InvalidQP(QDTError):
    pass


class VertexMismatch(QDTError):
    pass


class NotACut(QDTError):
    pass


class NotStrictSource(QDTError):
    pass


class NonIsolatedTwoCycle(QDTError):
    def __init__(self, message: str, term=None):
        self.term = term
        super().__init__(message)


class InjectivityFailed(QDTError):
    pass


class RelationViolation(QDTError):
    pass


class BudgetExceeded(QDTError):
    def __init__(self, estimate: int, budget: int, what: str = "enumeration"):
        self.estimate = estimate
        self.budget = budget
        super().__init__(f"{what} needs about {estimate:.3g} operations, budget is {budget:.3g}")


class HoldoutMismatch(QDTError):
    pass


class InsufficientSamples(QDTError):
    pass


class NonIntegerCoefficients(QDTError):
    pass


class DivideByZero(QDTError, ZeroDivisionError):
    pass


class BoxMismatch(QDTError):
    pass


class NonUnitConstantTerm(QDTError):
    pass


class ZeroVector(QDTError):
    pass


class InvalidDimer(QDTError):
    pass
