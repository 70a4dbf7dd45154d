# services/pattern-packing/src/permpack/errors.py
"""Exception hierarchy shared by the library, the CLI and the HTTP service.

Every error carries the process exit code the CLI returns for it.
"""


class PermPackError(Exception):
    """Base class for every error raised by permpack"""

    exit_code = 1


class ParseError(PermPackError):
    """Text input could not be parsed"""

    exit_code = 2


class MalformedPermutationError(ParseError):
    """Word is not a bijection of [n]"""


class DimensionMismatchError(PermPackError):
    """Point dimension differs from the number of polynomial variables"""

    exit_code = 2


class HypothesisError(PermPackError):
    """A theorem's hypothesis does not hold for the given input"""

    exit_code = 3


class NotLayeredError(HypothesisError):
    """Operation needs a layered permutation"""


class NonConicalError(HypothesisError):
    """Operation needs non-negative coefficients"""


class CapExceededError(PermPackError):
    """Requested size exceeds a configured cap"""

    exit_code = 4


class InconsistencyError(PermPackError):
    """Internal consistency check failed (sandwich inversion, infeasible problem, ...)"""

    exit_code = 5


class InfeasibleError(InconsistencyError):
    """Every coordinate of the simplex was forced to zero"""
