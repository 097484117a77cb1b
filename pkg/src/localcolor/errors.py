"""Exception hierarchy shared by every module."""


class LocalColorError(Exception):
    """Base class for all package errors."""


class GraphFormatError(LocalColorError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownVertexError(LocalColorError, KeyError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"unknown vertex {vertex!r}")

    def __str__(self):
        return self.args[0]


class BudgetExceeded(LocalColorError):
    """An exact search hit its work budget before reaching a verdict."""

    def __init__(self, message, vertex=None, nodes=None):
        self.vertex = vertex
        self.nodes = nodes
        super().__init__(message)


class ModelViolation(LocalColorError):
    """A node program broke the LOCAL-model contract."""


class RoundLimitExceeded(LocalColorError):
    def __init__(self, unhalted, rounds, outputs=None):
        self.unhalted = frozenset(unhalted)
        self.rounds = rounds
        self.outputs = outputs or {}
        super().__init__(
            f"{len(self.unhalted)} vertices still running after {rounds} rounds"
        )


class PreconditionError(LocalColorError, ValueError):
    """Input violates an operation precondition."""


class SlackViolation(PreconditionError):
    """A vertex has too little list slack for the requested extension."""

    def __init__(self, vertex, list_size, d_u, d_g, required, stage=None):
        self.vertex = vertex
        self.list_size = list_size
        self.d_u = d_u
        self.d_g = d_g
        self.required = required
        self.stage = stage
        where = f" at stage {stage}" if stage is not None else ""
        super().__init__(
            f"slack violation{where}: vertex {vertex} has |L|={list_size}, "
            f"d_U={d_u}, d_G={d_g}, required slack {required}"
        )


class InsufficientAntimatching(PreconditionError):
    def __init__(self, component, found, needed):
        self.component = component
        self.found = found
        self.needed = needed
        super().__init__(
            f"complement matching of size {found} < {needed} needed "
            f"(component too clique-like for this k)"
        )


class LLLPhaseLimit(LocalColorError):
    def __init__(self, assignment, violated, phases):
        self.assignment = assignment
        self.violated = tuple(violated)
        self.phases = phases
        super().__init__(
            f"{len(self.violated)} events still violated after {phases} phases"
        )


class StageError(LocalColorError):
    """A pipeline step failed; wraps the underlying error with the proof step."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"{step}: {cause}")
