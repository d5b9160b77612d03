"""Exception types shared across the package."""


class DegenerateChannelError(ArithmeticError):
    """A channel-dependent step hit a (numerically) singular matrix.

    ``where`` names the offending cluster, edge or cell so that callers can
    report it; generic channels never trigger this.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class RankDeficiencyError(DegenerateChannelError):
    """An effective direct link ``U^H H V`` lost rank."""


class UnorderedEdgeError(ValueError):
    """A decoding order left some interference edges unoriented."""

    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


class InfeasibleLPError(ValueError):
    """The triangle LP has no feasible point (``gamma < min(g)``)."""

    def __init__(self, message, min_g=None, gamma=None):
        super().__init__(message)
        self.min_g = min_g
        self.gamma = gamma
