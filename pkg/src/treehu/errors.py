"""Exception types shared by all treehu modules."""


class TreeHUError(Exception):
    """Base class; the CLI maps every subclass to exit code 2."""


# graph_core
class GraphError(TreeHUError, ValueError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class NotRegular(GraphError):
    def __init__(self, vertex, degree, expected):
        self.vertex = vertex
        self.degree = degree
        self.expected = expected
        super().__init__(f"vertex {vertex} has degree {degree}, expected {expected}")


class NotConnected(GraphError):
    pass


class DegreeTooSmall(GraphError):
    pass


class UnknownName(GraphError):
    pass


class BadParams(GraphError):
    pass


class GraphSyntaxError(GraphError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


# spectral / spherical
class NoConvergence(TreeHUError, RuntimeError):
    pass


class OutOfSpectrum(TreeHUError, ValueError):
    pass


class RootOutOfRange(TreeHUError, ValueError):
    pass


class WrongBranch(TreeHUError, ValueError):
    pass


class OutOfSupport(TreeHUError, ValueError):
    pass


# variance / rational_atoms / covering_oracle
class NotStealthy(TreeHUError, ValueError):
    pass


class NotCoprime(TreeHUError, ValueError):
    pass


class RadiusTooLarge(TreeHUError, ValueError):
    pass


class CountOverflow(TreeHUError, OverflowError):
    pass
