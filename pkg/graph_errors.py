# graph_errors.py
"""
Exception hierarchy shared by every netdist module.

Each class name is the error kind reported to users; `exit_code` is what the
command-line front end returns when the error escapes a command.
"""


class NetDistError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1

    @property
    def kind(self):
        return type(self).__name__


# --- input / parameter errors (exit 2) ---

class ParseError(NetDistError):
    exit_code = 2


class SelfLoop(NetDistError):
    exit_code = 2

    def __init__(self, vertex):
        super().__init__(f"self-loop at vertex {vertex}")
        self.vertex = vertex


class VertexOutOfRange(NetDistError):
    exit_code = 2


class NonpositiveWeight(NetDistError):
    exit_code = 2


class AsymmetricInput(NetDistError):
    exit_code = 2


class EventOutOfRange(NetDistError):
    exit_code = 2


class NotSymmetric(NetDistError):
    exit_code = 2


class KOutOfRange(NetDistError):
    exit_code = 2


class InvalidParams(NetDistError):
    exit_code = 2


class UnsupportedModel(NetDistError):
    exit_code = 2


class EmptySample(NetDistError):
    exit_code = 2


class SeriesTooShort(NetDistError):
    exit_code = 2


# --- comparison errors (exit 3) ---

class SizeMismatch(NetDistError):
    exit_code = 3

    def __init__(self, n1, n2):
        super().__init__(f"graphs have different vertex counts: {n1} vs {n2}")
        self.n1 = n1
        self.n2 = n2


class Disconnected(NetDistError):
    exit_code = 3


# --- numerical errors ---

class SingularSystem(NetDistError):
    pass


class NegativeAffinity(NetDistError):
    pass


class DegenerateNull(NetDistError):
    exit_code = 4


class ZeroMean(NetDistError):
    exit_code = 5


class RetriesExhausted(NetDistError):
    exit_code = 6


def error_class(kind):
    """Look up an error class by kind name (used to re-raise worker errors)"""
    pending = [NetDistError]
    while pending:
        cls = pending.pop()
        if cls.__name__ == kind:
            return cls
        pending.extend(cls.__subclasses__())
    return NetDistError


def rebuild_error(kind, message):
    """Recreate an error from its kind and text without calling a custom __init__"""
    cls = error_class(kind)
    err = cls.__new__(cls)
    Exception.__init__(err, message)
    return err
