"""Exception hierarchy shared by every qpor module."""

from __future__ import annotations


class QporError(Exception):
    """Base class for all errors raised by qpor."""


class ExecutionError(QporError):
    """A statement could not be executed (bad index, division by zero, ...)."""

    def __init__(self, kind: str, message: str, thread: int | None = None, line: int | None = None):
        self.kind = kind
        self.thread = thread
        self.line = line
        where = ""
        if thread is not None:
            where = f" (thread {thread}" + (f", line {line})" if line is not None else ")")
        super().__init__(f"{kind}: {message}{where}")


class ActionNotEnabled(ExecutionError):
    def __init__(self, action, thread: int | None = None):
        super().__init__("action-not-enabled", f"{action} is not enabled", thread)
        self.action = action


class NotARun(QporError):
    """A sequence of actions is not a run of the program."""

    def __init__(self, index: int, action):
        self.index = index
        self.action = action
        super().__init__(f"not-a-run: action #{index} {action} is not enabled")


class StepLimitExceeded(QporError):
    def __init__(self, limit: int, prefix=()):
        self.limit = limit
        self.prefix = tuple(prefix)
        super().__init__(f"step-limit-exceeded: a run exceeded {limit} actions")


class FrameLimitExceeded(QporError):
    def __init__(self, limit: int, prefix=()):
        self.limit = limit
        self.prefix = tuple(prefix)
        super().__init__(f"recursion-limit-exceeded: more than {limit} exploration frames")


class InconsistentPredecessors(QporError):
    pass


class DepthOutOfRange(QporError):
    pass


class DifferentTrees(QporError):
    pass


class TooLarge(QporError):
    pass


class OracleLimitExceeded(QporError):
    pass


class ParseError(QporError):
    """Syntax or semantic error in a DSL source file."""

    def __init__(self, kind: str, message: str, line: int, col: int, path: str | None = None):
        self.kind = kind
        self.line = line
        self.col = col
        self.path = path
        prefix = f"{path}:" if path else ""
        super().__init__(f"{prefix}{line}:{col}: {kind}: {message}")
