"""Exception hierarchy shared by every antjoin module."""


class AntJoinError(ValueError):
    """Base class for all domain errors raised by antjoin."""


class GraphError(AntJoinError):
    """A query graph violates one of its structural invariants."""


class TooFewTables(GraphError):
    pass


class BadCardinality(GraphError):
    pass


class BadSelectivity(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class InvalidEdge(GraphError):
    """Edge endpoints are out of range or form a self-join."""


class DisconnectedGraph(GraphError):
    pass


class OrderError(AntJoinError):
    """A join order is not valid for its graph."""


class NotAPermutation(OrderError):
    pass


class ConnectivityViolation(OrderError):
    def __init__(self, position: int, table: int | None = None):
        self.position = position
        self.table = table
        msg = f"table at position {position} is not adjacent to any earlier table"
        if table is not None:
            msg = f"table {table} at position {position} is not adjacent to any earlier table"
        super().__init__(msg)


class GraphSyntaxError(AntJoinError):
    """The graph document is not well-formed JSON."""


class SchemaError(AntJoinError):
    """The graph document is JSON but does not follow the graph schema."""


class SameTable(AntJoinError):
    pass


class NextAlreadyJoined(AntJoinError):
    pass


class TooLarge(AntJoinError):
    def __init__(self, n: int, limit: int, what: str = "algorithm"):
        self.n = n
        self.limit = limit
        super().__init__(f"{what} supports at most {limit} tables, got {n}")


class ConfigError(AntJoinError):
    """Invalid parameters for an optimizer, generator or benchmark."""
