"""Exception hierarchy; the CLI maps these onto exit codes."""


class SpecgapError(Exception):
    pass


class UsageError(SpecgapError, ValueError):
    """Bad arguments: out-of-range vertex, invalid family parameter, zero vector."""


class GraphError(UsageError):
    """Invalid graph construction."""


class ParseError(UsageError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DomainError(SpecgapError, ValueError):
    """Input outside an operation's domain: isolated vertex, disconnected graph, low degree."""


class NumericError(SpecgapError, ArithmeticError):
    pass
