"""Exception hierarchy. The CLI maps each family to an exit code."""


class ToricError(Exception):
    exit_code = 1


class ConfigError(ToricError, ValueError):
    """Malformed representation, monomial text or run configuration."""

    exit_code = 1


class ConeError(ToricError):
    exit_code = 2


class HilbertCapExhausted(ConeError):
    """The completion had not stabilized when the degree cap was reached.

    ``partial`` holds the basis elements found so far. Every one of them is a
    genuine minimal element, so ``max(map(sum, partial))`` is a lower bound on
    the true maximal degree.
    """

    def __init__(self, message, partial=(), reached=0):
        super().__init__(message)
        self.partial = tuple(partial)
        self.reached = reached

    @property
    def degree_lower_bound(self):
        return max((sum(h) for h in self.partial), default=0)


class ResourceCapExceeded(ToricError):
    """An enumeration grew past its configured size limit."""

    exit_code = 3

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = tuple(partial)


class NotARelation(ToricError, ValueError):
    exit_code = 4


class DecompositionError(ToricError):
    """Raised when a zero-sum block cannot be extracted.

    In practice this means D (or the cone built from it) is too small for the
    matrix at hand.
    """

    exit_code = 5


class BoundExceeded(DecompositionError):
    """Rearrangement could not push every column sum under D."""

    def __init__(self, message, best_sq_norm, permutations=None):
        super().__init__(message)
        self.best_sq_norm = best_sq_norm
        self.permutations = permutations
