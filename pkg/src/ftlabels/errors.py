"""Exception types shared across the package."""


class FTLabelError(Exception):
    """Base class for all errors raised by ftlabels."""


class GraphError(FTLabelError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class BadVertexId(GraphError):
    pass


class BadWeight(GraphError):
    pass


class Disconnected(GraphError):
    """Raised when an operation needs a connected graph.

    ``components`` holds the vertex sets of the connected components found.
    """

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        super().__init__(f"graph has {len(self.components)} connected components")


class MixedInstance(FTLabelError):
    """Labels from different scheme instances were combined in one query."""


class TooManyFaults(FTLabelError):
    pass


class DimensionMismatch(FTLabelError):
    pass


class IndexOutOfRange(FTLabelError):
    pass


class EmptyTreeFaults(FTLabelError):
    pass


class PropertyViolation(FTLabelError):
    """A constructed structure failed its post-construction verification."""


class Undelivered(FTLabelError):
    pass


class BadSpec(FTLabelError):
    pass


class MissingLabel(FTLabelError):
    pass


class BadConfig(FTLabelError):
    pass
