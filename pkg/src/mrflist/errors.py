"""Exception hierarchy shared by every module."""


class MrfError(Exception):
    """Base class for all library errors."""


class CycleDetected(MrfError):
    pass


class UnknownNode(MrfError):
    pass


class SelfEdge(MrfError):
    pass


class DuplicateNode(MrfError):
    pass


class NodeAbsent(MrfError):
    pass


class NodePresent(MrfError):
    pass


class InfeasibleMove(MrfError):
    pass


class InfeasibleInsert(MrfError):
    pass


class NodeSetMismatch(MrfError):
    pass


class UnorderedChain(MrfError):
    pass


class MissingBit(MrfError):
    pass


class NonEmptyDag(MrfError):
    pass


class NotFeasible(MrfError):
    pass


class TooLarge(MrfError):
    pass


class BadSpec(MrfError):
    pass


class ValidationError(MrfError):
    pass


class ParseError(MrfError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BadCidr(ParseError):
    pass


class BadPort(ParseError):
    pass


class NoMatch(MrfError):
    """No rule matches the packet (default policy applies)."""
