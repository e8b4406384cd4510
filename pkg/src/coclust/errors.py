"""Exception hierarchy shared by all coclust modules."""


class CoclustError(Exception):
    """Base class for every error raised by this package."""


class DegenerateCluster(CoclustError):
    """A closed-form membership update hit a singular denominator."""

    def __init__(self, cluster, side, iteration=None):
        self.cluster = cluster
        self.side = side
        self.iteration = iteration
        msg = f"degenerate cluster {cluster}: singular {side} update denominator"
        if iteration is not None:
            msg += f" (iteration {iteration})"
        super().__init__(msg)

    def at_iteration(self, iteration):
        return DegenerateCluster(self.cluster, self.side, iteration)


class AllClipped(CoclustError):
    """Every entry of a membership vector was clipped to zero."""


class NonFinite(CoclustError):
    """A membership or objective value became NaN or infinite."""


class FieldTooLong(CoclustError):
    def __init__(self, field, limit, length):
        self.field = field
        self.limit = limit
        self.length = length
        super().__init__(f"{field} is {length} characters; limit is {limit}")


class EmptyKeywords(CoclustError):
    pass


class UnknownLink(CoclustError):
    def __init__(self, link_id):
        self.link_id = link_id
        super().__init__(f"unknown link id {link_id}")


class CorruptStore(CoclustError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"corrupt store at line {line}: {reason}")


class LimitViolation(CorruptStore):
    """A stored link field exceeds its registration limit."""


class DimensionMismatch(CoclustError):
    pass


class InvalidMatrix(CoclustError):
    """Matrix values violate a domain invariant (e.g. negative correlation)."""
